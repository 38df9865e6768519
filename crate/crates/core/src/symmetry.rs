//! Entry permutations that map a period class onto itself.
//!
//! A permutation `φ` of `{0, ..., n-1}` acts on tuples by
//! `(x_0, ..., x_{n-1}) -> (x_{φ(0)}, ..., x_{φ(n-1)})`. For a period `d`
//! the stabilizer `J` is the set of `φ` sending every tuple of period `d`
//! to a tuple of period `d`. All `n!` permutations are tested, so `n` is
//! limited to [`MAX_N`].

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::arith::{factorize, gcd, lcm};
use crate::cycle::{max_period, DEFAULT_STEP_BUDGET};
use crate::fixed_space::exact_period_members;
use crate::ring::{Params, Tuple};
use crate::spectrum::{brute_spectrum, EnumOptions};
use crate::{Error, Result};

pub const MAX_N: usize = 8;

/// Largest class size collected when building a period class.
pub const DEFAULT_CLASS_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    image: Vec<usize>,
}

impl Perm {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut hit = alloc::vec![false; n];
        for &i in &image {
            if i >= n || hit[i] {
                return Err(Error::InvalidParams(alloc::format!("{image:?} is not a permutation")));
            }
            hit[i] = true;
        }
        Ok(Perm { image })
    }

    pub fn identity(n: usize) -> Self {
        Perm { image: (0..n).collect() }
    }

    /// The permutation whose action is the rotation `H`.
    pub fn rotation(n: usize) -> Self {
        Perm { image: (0..n).map(|i| (i + 1) % n).collect() }
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`, i.e. `i -> self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm { image: other.image.iter().map(|&j| self.image[j]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = alloc::vec![0; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Perm { image: inv }
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.image.len();
        let mut seen = alloc::vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.image[i];
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable();
        out
    }

    pub fn order(&self) -> u64 {
        self.cycle_lengths().into_iter().fold(1, |acc, l| lcm(acc, l as u64))
    }

    pub fn is_full_cycle(&self) -> bool {
        self.cycle_lengths() == [self.image.len()]
    }

    pub fn act(&self, xs: &[u64]) -> Vec<u64> {
        self.image.iter().map(|&j| xs[j]).collect()
    }

    /// Position in the lexicographic order of `S_n`.
    pub fn rank(&self) -> u64 {
        let n = self.image.len();
        let mut rank = 0u64;
        for i in 0..n {
            let smaller = self.image[i + 1..].iter().filter(|&&x| x < self.image[i]).count() as u64;
            rank = rank * (n - i) as u64 + smaller;
        }
        rank
    }

    pub fn from_rank(n: usize, mut rank: u64) -> Perm {
        let mut digits = alloc::vec![0usize; n];
        for i in (0..n).rev() {
            let base = (n - i) as u64;
            digits[i] = (rank % base) as usize;
            rank /= base;
        }
        let mut pool: Vec<usize> = (0..n).collect();
        Perm { image: digits.into_iter().map(|d| pool.remove(d)).collect() }
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, i) in self.image.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("]")
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupReport {
    pub order: u64,
    pub generators: Vec<Perm>,
    pub element_order_histogram: BTreeMap<u64, u64>,
    pub is_abelian: bool,
    pub contains_n_cycle: bool,
    pub name_hint: String,
    /// Every element, in rank order.
    pub elements: Vec<Perm>,
}

/// Sorted entry vectors of a class, for binary-search membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassIndex {
    n: usize,
    members: Vec<Vec<u64>>,
}

impl ClassIndex {
    pub fn new(n: usize, members: impl IntoIterator<Item = Tuple>) -> Self {
        let mut members: Vec<Vec<u64>> = members.into_iter().map(Tuple::into_entries).collect();
        members.sort_unstable();
        members.dedup();
        ClassIndex { n, members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, xs: &[u64]) -> bool {
        self.members.binary_search_by(|m| m.as_slice().cmp(xs)).is_ok()
    }

    pub fn preserved_by(&self, perm: &Perm) -> bool {
        self.members.iter().all(|m| self.contains(&perm.act(m)))
    }

    /// Ranks in `ranks` whose permutation preserves the class.
    pub fn scan(&self, ranks: Range<u64>) -> Vec<u64> {
        ranks.filter(|&r| self.preserved_by(&Perm::from_rank(self.n, r))).collect()
    }
}

/// Every tuple with `Per(u) = d`.
///
/// For prime `m` with `L_m(n) = 0` every tuple lies on a cycle and the class
/// comes from the fixed spaces; otherwise the space is enumerated.
pub fn class_members(params: Params, d: u64, opts: EnumOptions) -> Result<Vec<Tuple>> {
    let record = max_period(params, opts.step_budget)?;
    if record.period % d != 0 {
        return Ok(Vec::new());
    }
    if crate::arith::is_prime(params.m()) && record.len == 0 {
        return exact_period_members(params, d, DEFAULT_CLASS_LIMIT);
    }
    let e = brute_spectrum(params, opts)?;
    Ok(e.class_filter(d).map(|(u, _)| u).collect())
}

/// The stabilizer of the class of period `d` in `Z_m^n`.
pub fn stabilizer(params: Params, d: u64) -> Result<GroupReport> {
    check_degree(params.n())?;
    let opts = EnumOptions { step_budget: DEFAULT_STEP_BUDGET, ..EnumOptions::default() };
    let members = class_members(params, d, opts)?;
    if members.is_empty() {
        return Err(Error::EmptyClass { period: d });
    }
    let index = ClassIndex::new(params.n(), members);
    let ranks = index.scan(0..factorial(params.n()));
    group_report(params.n(), &ranks)
}

pub fn check_degree(n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::InvalidParams(alloc::format!("symmetry search needs n <= {MAX_N}, got {n}")));
    }
    Ok(())
}

/// Builds the report for the permutations with the given ranks, checking
/// that they form a group.
pub fn group_report(n: usize, ranks: &[u64]) -> Result<GroupReport> {
    check_degree(n)?;
    let total = factorial(n) as usize;
    let mut member = alloc::vec![false; total];
    for &r in ranks {
        member[r as usize] = true;
    }
    let elements: Vec<Perm> = (0..total).filter(|&r| member[r]).map(|r| Perm::from_rank(n, r as u64)).collect();
    let not_group = |why: &str| Error::Internal(alloc::format!("stabilizer is not a group: {why}"));
    if !member[0] {
        return Err(not_group("identity missing"));
    }
    for p in &elements {
        if !member[p.inverse().rank() as usize] {
            return Err(not_group("not closed under inverses"));
        }
    }

    // greedy generators; each closure is checked against the member set
    let mut generators: Vec<Perm> = Vec::new();
    let mut in_span = alloc::vec![false; total];
    in_span[0] = true;
    let mut span_size = 1usize;
    for p in &elements {
        if in_span[p.rank() as usize] {
            continue;
        }
        generators.push(p.clone());
        span_size = 0;
        in_span.iter_mut().for_each(|x| *x = false);
        let mut queue = VecDeque::from([Perm::identity(n)]);
        in_span[0] = true;
        span_size += 1;
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = g.compose(&x);
                let r = y.rank() as usize;
                if in_span[r] {
                    continue;
                }
                if !member[r] {
                    return Err(not_group("not closed under composition"));
                }
                in_span[r] = true;
                span_size += 1;
                queue.push_back(y);
            }
        }
    }
    if span_size != elements.len() {
        return Err(not_group("generators do not span"));
    }

    let mut hist = BTreeMap::new();
    for p in &elements {
        *hist.entry(p.order()).or_insert(0u64) += 1;
    }
    let is_abelian = generators
        .iter()
        .enumerate()
        .all(|(i, a)| generators[i + 1..].iter().all(|b| a.compose(b) == b.compose(a)));
    let contains_n_cycle = elements.iter().any(Perm::is_full_cycle);
    let order = elements.len() as u64;
    let name_hint = if order == total as u64 {
        alloc::format!("S{n}")
    } else {
        identify_small_group(order, &hist, is_abelian)
    };
    Ok(GroupReport { order, generators, element_order_histogram: hist, is_abelian, contains_n_cycle, name_hint, elements })
}

fn cyclic_histogram(k: u64) -> BTreeMap<u64, u64> {
    crate::arith::divisors(k).into_iter().map(|e| (e, crate::arith::euler_phi(e))).collect()
}

fn dihedral_histogram(k: u64) -> BTreeMap<u64, u64> {
    let mut h = cyclic_histogram(k);
    *h.entry(2).or_insert(0) += k;
    h
}

/// Name of the group with these invariants, or `"unknown"` when they do
/// not single out one group of that order (or the order exceeds 42).
pub fn identify_small_group(order: u64, histogram: &BTreeMap<u64, u64>, is_abelian: bool) -> String {
    let unknown = || String::from("unknown");
    if order == 0 || order > 42 || histogram.values().sum::<u64>() != order {
        return unknown();
    }
    if order == 1 {
        return String::from("trivial group");
    }
    if is_abelian {
        return abelian_name(order, histogram).unwrap_or_else(unknown);
    }
    if order.is_multiple_of(2) && *histogram == dihedral_histogram(order / 2) {
        return alloc::format!("D{order}");
    }
    let primes = factorize(order);
    if order == 21 {
        return String::from("Frobenius group of order 21");
    }
    if primes.len() == 2 && primes.iter().all(|&(_, e)| e == 1) {
        let (q, p) = (primes[0].0, primes[1].0);
        return alloc::format!("C{p} ⋊ C{q}");
    }
    let count = |k: u64| histogram.get(&k).copied().unwrap_or(0);
    match order {
        8 if count(2) == 1 => String::from("Q8"),
        12 if count(6) == 0 => String::from("A4"),
        12 if count(2) == 1 => String::from("Dic3"),
        24 if *histogram == BTreeMap::from([(1, 1), (2, 9), (3, 8), (4, 6)]) => String::from("S4"),
        _ => unknown(),
    }
}

/// Invariant factors `d_1 | d_2 | ...` read off the element orders.
fn abelian_name(order: u64, histogram: &BTreeMap<u64, u64>) -> Option<String> {
    // exponents[p] = sizes of the cyclic p-power factors
    let mut factors_by_prime: Vec<Vec<u64>> = Vec::new();
    for (p, e) in factorize(order) {
        let mut prev = 0u32;
        let mut ge_counts = Vec::new();
        let mut pk = 1u64;
        for _ in 1..=e {
            pk *= p;
            let c: u64 = histogram.iter().filter(|(o, _)| pk.is_multiple_of(**o)).map(|(_, c)| c).sum();
            let s = log_exact(c, p)?;
            ge_counts.push(s - prev);
            prev = s;
        }
        if prev != e {
            return None;
        }
        // ge_counts[k-1] = number of factors with exponent >= k
        let mut sizes = Vec::new();
        for k in 1..=e as usize {
            let here = ge_counts[k - 1] - ge_counts.get(k).copied().unwrap_or(0);
            for _ in 0..here {
                sizes.push(p.pow(k as u32));
            }
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        factors_by_prime.push(sizes);
    }
    let rank = factors_by_prime.iter().map(Vec::len).max().unwrap_or(0);
    let mut invariant: Vec<u64> = (0..rank)
        .map(|i| factors_by_prime.iter().filter_map(|f| f.get(i)).product())
        .collect();
    invariant.reverse();
    debug_assert!(invariant.windows(2).all(|w| w[1] % w[0] == 0 && gcd(w[0], w[1]) == w[0]));
    let names: Vec<String> = invariant.iter().map(|d| alloc::format!("C{d}")).collect();
    Some(names.join(" x "))
}

fn log_exact(mut c: u64, p: u64) -> Option<u32> {
    let mut k = 0;
    while c > 1 {
        if !c.is_multiple_of(p) {
            return None;
        }
        c /= p;
        k += 1;
    }
    (c == 1).then_some(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn hist(pairs: &[(u64, u64)]) -> BTreeMap<u64, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn rank_round_trips() {
        for n in 1..=6 {
            for r in 0..factorial(n) {
                assert_eq!(Perm::from_rank(n, r).rank(), r);
            }
        }
        assert!(Perm::from_rank(4, 0).is_identity());
        assert_eq!(Perm::from_rank(3, 5).image(), &[2, 1, 0]);
    }

    #[test]
    fn action_and_composition() {
        let h = Perm::rotation(4);
        assert_eq!(h.act(&[1, 2, 3, 4]), vec![2, 3, 4, 1]);
        assert!(h.is_full_cycle());
        assert_eq!(h.order(), 4);
        let a = Perm::new(vec![1, 0, 2, 3]).unwrap();
        let x = [5u64, 6, 7, 8];
        assert_eq!(a.act(&h.act(&x)), h.compose(&a).act(&x));
        assert!(a.compose(&a.inverse()).is_identity());
        assert!(Perm::new(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn names_from_invariants() {
        assert_eq!(identify_small_group(10, &hist(&[(1, 1), (2, 5), (5, 4)]), false), "D10");
        assert_eq!(identify_small_group(21, &hist(&[(1, 1), (3, 14), (7, 6)]), false), "Frobenius group of order 21");
        assert_eq!(identify_small_group(1, &hist(&[(1, 1)]), true), "trivial group");
        assert_eq!(identify_small_group(6, &hist(&[(1, 1), (2, 3), (3, 2)]), false), "D6");
        assert_eq!(identify_small_group(8, &hist(&[(1, 1), (2, 1), (4, 6)]), false), "Q8");
        assert_eq!(identify_small_group(8, &hist(&[(1, 1), (2, 5), (4, 2)]), false), "D8");
        assert_eq!(identify_small_group(12, &hist(&[(1, 1), (2, 3), (3, 8)]), false), "A4");
        assert_eq!(identify_small_group(4, &hist(&[(1, 1), (2, 3)]), true), "C2 x C2");
        assert_eq!(identify_small_group(12, &hist(&[(1, 1), (2, 3), (3, 2), (6, 6)]), true), "C2 x C6");
        assert_eq!(identify_small_group(7, &hist(&[(1, 1), (7, 6)]), true), "C7");
        assert_eq!(identify_small_group(39, &hist(&[(1, 1), (3, 26), (13, 12)]), false), "C13 ⋊ C3");
        assert_eq!(identify_small_group(120, &hist(&[(1, 120)]), false), "unknown");
        assert_eq!(identify_small_group(16, &hist(&[(1, 1), (2, 3), (4, 12)]), false), "unknown");
    }

    #[test]
    fn abelian_names_match_direct_products() {
        // element orders of C_a x C_b computed directly
        for (a, b, name) in [(2u64, 4u64, "C2 x C4"), (3, 3, "C3 x C3"), (2, 3, "C6"), (4, 4, "C4 x C4"), (2, 10, "C2 x C10")] {
            let mut h = BTreeMap::new();
            for i in 0..a {
                for j in 0..b {
                    let o = lcm(a / gcd(a, i), b / gcd(b, j));
                    *h.entry(o).or_insert(0) += 1;
                }
            }
            assert_eq!(identify_small_group(a * b, &h, true), name);
        }
    }

    #[test]
    fn symmetric_groups_are_groups() {
        for n in 2..=5 {
            let ranks: Vec<u64> = (0..factorial(n)).collect();
            let g = group_report(n, &ranks).unwrap();
            assert_eq!(g.order, factorial(n));
            assert_eq!(g.name_hint, alloc::format!("S{n}"));
            assert_eq!(g.is_abelian, n == 2);
        }
        let s4 = group_report(4, &(0..24).collect::<Vec<_>>()).unwrap();
        assert_eq!(identify_small_group(24, &s4.element_order_histogram, false), "S4");
    }

    #[test]
    fn non_groups_are_rejected() {
        let t = Perm::new(vec![1, 0, 2]).unwrap().rank();
        let c = Perm::rotation(3).rank();
        assert!(group_report(3, &[0, t, c]).is_err());
        assert!(group_report(3, &[t]).is_err());
    }

    #[test]
    fn z11_n5_period_5_is_dihedral() {
        let g = stabilizer(Params::new(5, 11).unwrap(), 5).unwrap();
        assert_eq!(g.order, 10);
        assert!(!g.is_abelian);
        assert!(g.contains_n_cycle);
        assert_eq!(g.name_hint, "D10");
        assert_eq!(g.element_order_histogram, hist(&[(1, 1), (2, 5), (5, 4)]));
    }

    #[test]
    fn period_one_class() {
        for (n, m) in [(3usize, 4u64), (3, 5), (5, 7)] {
            let g = stabilizer(Params::new(n, m).unwrap(), 1).unwrap();
            assert_eq!(g.order, factorial(n));
        }
        // in Z_3^4 the class also holds the vanishing tuples (1,2,1,2), (2,1,2,1)
        let g = stabilizer(Params::new(4, 3).unwrap(), 1).unwrap();
        assert_eq!(g.order, 8);
        assert_eq!(g.name_hint, "D8");
    }

    #[test]
    fn rotation_always_stabilizes() {
        for (n, m, d) in [(5usize, 11u64, 2u64), (5, 7, 80), (3, 4, 3), (4, 3, 1)] {
            let g = stabilizer(Params::new(n, m).unwrap(), d).unwrap();
            assert!(g.elements.contains(&Perm::rotation(n)), "n={n} m={m} d={d}");
        }
    }

    #[test]
    fn empty_class_and_degree_limits() {
        assert!(matches!(stabilizer(Params::new(5, 7).unwrap(), 7), Err(Error::EmptyClass { period: 7 })));
        assert!(matches!(stabilizer(Params::new(5, 7).unwrap(), 2), Err(Error::EmptyClass { period: 2 })));
        assert!(stabilizer(Params::new(9, 2).unwrap(), 1).is_err());
    }
}
