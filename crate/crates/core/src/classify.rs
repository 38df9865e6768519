//! Special tuple classes with closed-form periods.

use alloc::vec::Vec;

use crate::arith::{gcd, multiplicative_order, split_two_power};
use crate::ring::{Params, Tuple};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleClass {
    pub is_zero: bool,
    /// All entries equal and nonzero.
    pub is_uniform: bool,
    /// Entries sum to `0 mod m`.
    pub satisfies_sum: bool,
    /// Proper divisors `n1` of `n` such that the tuple is one block of
    /// length `n1` repeated `n / n1` times, ascending.
    pub repeated_blocks: Vec<usize>,
}

impl TupleClass {
    pub fn is_repeated_block(&self, n1: usize) -> bool {
        self.repeated_blocks.contains(&n1)
    }

    /// The single bucket used in spectrum breakdowns.
    pub fn tag(&self) -> ClassTag {
        if self.is_zero {
            ClassTag::Zero
        } else if self.is_uniform {
            ClassTag::Uniform
        } else if self.satisfies_sum {
            ClassTag::Sum
        } else {
            ClassTag::Other
        }
    }
}

/// Exclusive buckets: zero first, then uniform, then the sum condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassTag {
    Zero,
    Uniform,
    Sum,
    Other,
}

impl ClassTag {
    pub const ALL: [ClassTag; 4] = [ClassTag::Zero, ClassTag::Uniform, ClassTag::Sum, ClassTag::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::Zero => "zero",
            ClassTag::Uniform => "uniform",
            ClassTag::Sum => "sum",
            ClassTag::Other => "other",
        }
    }
}

/// Tuple counts per [`ClassTag`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ClassCounts {
    pub zero: u128,
    pub uniform: u128,
    pub sum: u128,
    pub other: u128,
}

impl ClassCounts {
    pub fn add(&mut self, tag: ClassTag, count: u128) {
        *self.slot(tag) += count;
    }

    pub fn get(&self, tag: ClassTag) -> u128 {
        match tag {
            ClassTag::Zero => self.zero,
            ClassTag::Uniform => self.uniform,
            ClassTag::Sum => self.sum,
            ClassTag::Other => self.other,
        }
    }

    fn slot(&mut self, tag: ClassTag) -> &mut u128 {
        match tag {
            ClassTag::Zero => &mut self.zero,
            ClassTag::Uniform => &mut self.uniform,
            ClassTag::Sum => &mut self.sum,
            ClassTag::Other => &mut self.other,
        }
    }

    pub fn total(&self) -> u128 {
        self.zero + self.uniform + self.sum + self.other
    }

    pub fn merge(&mut self, other: &ClassCounts) {
        for tag in ClassTag::ALL {
            self.add(tag, other.get(tag));
        }
    }
}

pub fn classify(u: &Tuple) -> TupleClass {
    let xs = u.entries();
    let n = xs.len();
    let is_zero = u.is_zero();
    let all_equal = xs.iter().all(|&x| x == xs[0]);
    let repeated_blocks = (1..n)
        .filter(|&n1| n.is_multiple_of(n1) && (n1..n).all(|i| xs[i] == xs[i - n1]))
        .collect();
    TupleClass {
        is_zero,
        is_uniform: all_equal && !is_zero,
        satisfies_sum: u.entry_sum() == 0,
        repeated_blocks,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniformPeriod {
    /// The sequence of `(x, ..., x)` reaches the zero tuple.
    Vanishes,
    Period(u64),
}

/// Period of `(x, ..., x)`. With `m = 2^l * m1`, `m1` odd, it vanishes when
/// `m1 | x`, and otherwise has period `ord_{m1 / gcd(x, m1)}(2)`. This is
/// `ord_{m1}(2)` whenever `x` is prime to `m1`.
pub fn uniform_period(x: u64, params: Params) -> Result<UniformPeriod> {
    let m = params.m();
    if x == 0 || x >= m {
        return Err(Error::InvalidParams(alloc::format!("need 0 < x < m, got x = {x}")));
    }
    let (_, m1) = split_two_power(m);
    if m1 == 1 || x.is_multiple_of(m1) {
        return Ok(UniformPeriod::Vanishes);
    }
    let order = multiplicative_order(2, m1 / gcd(x, m1)).expect("2 is a unit mod an odd modulus");
    Ok(UniformPeriod::Period(order))
}

/// Period of a triple whose entries sum to `0 mod m`: 1 for the zero
/// tuple, 3 when `m` is even and every entry is `0` or `m/2`, 6 otherwise.
///
/// Nonzero triples with all entries equal are rejected; their period is
/// given by [`uniform_period`].
pub fn sum_triple_period(u: &Tuple) -> Result<u64> {
    let params = u.params();
    if params.n() != 3 {
        return Err(Error::NotApplicable("sum-condition periods are closed-form only for n = 3"));
    }
    if u.entry_sum() != 0 {
        return Err(Error::NotApplicable("entries do not sum to 0 mod m"));
    }
    if u.is_zero() {
        return Ok(1);
    }
    let xs = u.entries();
    if xs[0] == xs[1] && xs[1] == xs[2] {
        return Err(Error::NotApplicable("all entries equal; use uniform_period"));
    }
    let m = params.m();
    if m.is_multiple_of(2) && xs.iter().all(|&x| x == 0 || x == m / 2) {
        Ok(3)
    } else {
        Ok(6)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::find_cycle;
    use crate::ring::{ducci_apply, ducci_step, rotate};
    use alloc::vec;

    fn t(n: usize, m: u64, xs: &[u64]) -> Tuple {
        Tuple::new(Params::new(n, m).unwrap(), xs.to_vec()).unwrap()
    }

    #[test]
    fn classify_examples() {
        let c = classify(&t(3, 4, &[2, 2, 2]));
        assert!(c.is_uniform && !c.satisfies_sum && !c.is_zero);
        for m in [4u64, 6, 10] {
            assert!(classify(&t(3, m, &[0, m / 2, m / 2])).satisfies_sum);
        }
        let c = classify(&t(6, 9, &[1, 2, 1, 2, 1, 2]));
        assert_eq!(c.repeated_blocks, vec![2]);
        assert!(c.is_repeated_block(2) && !c.is_repeated_block(3));
        let z = classify(&Params::new(4, 5).unwrap().zero());
        assert!(z.is_zero && z.satisfies_sum && !z.is_uniform);
        assert_eq!(z.tag(), ClassTag::Zero);
    }

    #[test]
    fn uniform_period_examples() {
        let p8 = Params::new(3, 8).unwrap();
        for x in 1..8 {
            assert_eq!(uniform_period(x, p8).unwrap(), UniformPeriod::Vanishes);
        }
        for n in 2..9 {
            assert_eq!(uniform_period(1, Params::new(n, 11).unwrap()).unwrap(), UniformPeriod::Period(10));
        }
        assert_eq!(uniform_period(4, Params::new(5, 12).unwrap()).unwrap(), UniformPeriod::Period(2));
        assert_eq!(uniform_period(3, Params::new(5, 12).unwrap()).unwrap(), UniformPeriod::Vanishes);
        assert!(uniform_period(0, p8).is_err());
        // x shares a factor with m1 = 9: (3,3) -> (6,6) -> (3,3)
        assert_eq!(uniform_period(3, Params::new(2, 9).unwrap()).unwrap(), UniformPeriod::Period(2));
        assert_eq!(uniform_period(1, Params::new(2, 9).unwrap()).unwrap(), UniformPeriod::Period(6));
    }

    #[test]
    fn uniform_period_agrees_with_iteration() {
        for m in 2..=60u64 {
            for n in 2..=9 {
                let p = Params::new(n, m).unwrap();
                for x in 1..m {
                    let info = find_cycle(&p.uniform(x), 1 << 20).unwrap();
                    let expect = match uniform_period(x, p).unwrap() {
                        UniformPeriod::Vanishes => {
                            assert_eq!(info.per, 1);
                            let mut v = p.uniform(x);
                            for _ in 0..info.len {
                                v = ducci_step(&v);
                            }
                            assert!(v.is_zero());
                            1
                        }
                        UniformPeriod::Period(d) => d,
                    };
                    assert_eq!(info.per, expect, "n={n} m={m} x={x}");
                }
            }
        }
    }

    #[test]
    fn sum_triple_examples() {
        assert_eq!(sum_triple_period(&t(3, 4, &[0, 2, 2])).unwrap(), 3);
        assert!(matches!(sum_triple_period(&t(3, 3, &[1, 1, 1])), Err(Error::NotApplicable(_))));
        assert_eq!(sum_triple_period(&t(3, 7, &[1, 2, 4])).unwrap(), 6);
        assert_eq!(sum_triple_period(&t(3, 5, &[1, 1, 3])).unwrap(), 6);
        assert_eq!(sum_triple_period(&Params::new(3, 9).unwrap().zero()).unwrap(), 1);
        assert!(sum_triple_period(&t(3, 7, &[1, 2, 3])).is_err());
        assert!(sum_triple_period(&t(4, 7, &[1, 2, 4, 0])).is_err());
    }

    #[test]
    fn sum_triples_match_cycles_and_closed_forms() {
        for m in 2..=30u64 {
            let p = Params::new(3, m).unwrap();
            for a in 0..m {
                for b in 0..m {
                    let c = (2 * m - a - b) % m;
                    let u = Tuple::new(p, vec![a, b, c]).unwrap();
                    let info = find_cycle(&u, 1000).unwrap();
                    assert_eq!(info.len, 0, "{u} is on a cycle");
                    assert_eq!(ducci_apply(&u, 2), rotate(&u));
                    assert_eq!(ducci_step(&u).entry_sum(), 0);
                    assert_eq!(ducci_apply(&u, 6), u);
                    match sum_triple_period(&u) {
                        Ok(per) => assert_eq!(per, info.per, "{u}"),
                        Err(_) => assert!(a == b && b == c && a != 0),
                    }
                }
            }
        }
    }

    #[test]
    fn six_cycle_exists_for_every_m_above_two() {
        for m in 3..=40u64 {
            let u = t(3, m, &[0, 1, m - 1]);
            assert_eq!(find_cycle(&u, 1000).unwrap().per, 6, "m = {m}");
        }
    }

    #[test]
    fn repeated_blocks_keep_their_period() {
        for m in 2..=12u64 {
            for n1 in [2usize, 3] {
                for reps in [2usize, 3] {
                    let small = Params::new(n1, m).unwrap();
                    let big = Params::new(n1 * reps, m).unwrap();
                    for i in 0..small.state_count().unwrap() {
                        let block = Tuple::from_state_index(small, i).unwrap();
                        let long = Tuple::new(big, block.entries().repeat(reps)).unwrap();
                        assert!(long.is_zero() || classify(&long).is_repeated_block(n1));
                        assert_eq!(
                            find_cycle(&long, 1 << 20).unwrap().per,
                            find_cycle(&block, 1 << 20).unwrap().per
                        );
                    }
                }
            }
        }
    }
}
