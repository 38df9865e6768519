//! Tuples of `Z_m^n`, the Ducci step `D`, the rotation `H`, and the cyclic
//! polynomial ring `Z_m[y]/(y^n - 1)`.
//!
//! Two encodings are used and pinned by tests:
//!
//! * the coefficient row `a_{r,s}` (the coefficient of `x_s` in the first
//!   entry of `D^r(x)`) is the coefficient of `y^{s-1}` in `(1 + y)^r`;
//! * a tuple `u` is the polynomial `Σ u_i y^{i-1}`, and one Ducci step is
//!   multiplication by `1 + y^{n-1}`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::{add_mod, mul_mod};
use crate::{Error, Result};

/// Tuple length `n` and modulus `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Params {
    n: usize,
    m: u64,
}

impl Params {
    pub fn new(n: usize, m: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(alloc::format!("n = {n}, need n >= 2")));
        }
        if m < 2 {
            return Err(Error::InvalidParams(alloc::format!("m = {m}, need m >= 2")));
        }
        Ok(Params { n, m })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> u64 {
        self.m
    }

    /// `m^n`, if it fits in a `u64`.
    pub fn state_count(&self) -> Option<u64> {
        u32::try_from(self.n).ok().and_then(|n| self.m.checked_pow(n))
    }

    pub fn zero(&self) -> Tuple {
        Tuple { params: *self, entries: vec![0; self.n] }
    }

    /// The basic tuple `(0, ..., 0, 1)`.
    pub fn basic(&self) -> Tuple {
        let mut t = self.zero();
        t.entries[self.n - 1] = 1;
        t
    }

    pub fn uniform(&self, x: u64) -> Tuple {
        Tuple { params: *self, entries: vec![x % self.m; self.n] }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} m={}", self.n, self.m)
    }
}

/// An element of `Z_m^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple {
    params: Params,
    entries: Vec<u64>,
}

impl Tuple {
    pub fn new(params: Params, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != params.n {
            return Err(Error::InvalidParams(alloc::format!(
                "tuple has {} entries, expected {}",
                entries.len(),
                params.n
            )));
        }
        if let Some(x) = entries.iter().find(|&&x| x >= params.m) {
            return Err(Error::InvalidParams(alloc::format!(
                "entry {x} is not a residue mod {}",
                params.m
            )));
        }
        Ok(Tuple { params, entries })
    }

    /// Reduces every entry mod `m` instead of rejecting it.
    pub fn from_reduced(params: Params, entries: impl IntoIterator<Item = u64>) -> Result<Self> {
        let entries = entries.into_iter().map(|x| x % params.m).collect();
        Tuple::new(params, entries)
    }

    #[inline]
    pub fn params(&self) -> Params {
        self.params
    }

    #[inline]
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u64> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn entry_sum(&self) -> u64 {
        self.entries.iter().fold(0, |acc, &x| add_mod(acc, x, self.params.m))
    }

    /// Entrywise sum mod `m`.
    pub fn add(&self, other: &Tuple) -> Tuple {
        debug_assert_eq!(self.params, other.params);
        let m = self.params.m;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| add_mod(a, b, m))
            .collect();
        Tuple { params: self.params, entries }
    }

    pub fn scale(&self, k: u64) -> Tuple {
        let m = self.params.m;
        let k = k % m;
        let entries = self.entries.iter().map(|&x| mul_mod(x, k, m)).collect();
        Tuple { params: self.params, entries }
    }

    /// Radix-`m` index with the first entry most significant, so ascending
    /// index order is lexicographic tuple order. `None` if `m^n` overflows.
    pub fn state_index(&self) -> Option<u64> {
        self.params.state_count()?;
        Some(self.entries.iter().fold(0u64, |acc, &x| acc * self.params.m + x))
    }

    pub fn from_state_index(params: Params, mut index: u64) -> Result<Self> {
        match params.state_count() {
            Some(count) if index < count => {}
            _ => {
                return Err(Error::InvalidParams(alloc::format!(
                    "state index {index} out of range for {params}"
                )))
            }
        }
        let mut entries = vec![0; params.n];
        for slot in entries.iter_mut().rev() {
            *slot = index % params.m;
            index /= params.m;
        }
        Ok(Tuple { params, entries })
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// One Ducci step on raw residues: `dst[i] = src[i] + src[i+1 mod n]`.
#[inline]
pub(crate) fn step_slice(src: &[u64], dst: &mut [u64], m: u64) {
    let n = src.len();
    for i in 0..n - 1 {
        dst[i] = add_mod(src[i], src[i + 1], m);
    }
    dst[n - 1] = add_mod(src[n - 1], src[0], m);
}

pub fn ducci_step(u: &Tuple) -> Tuple {
    let mut entries = vec![0; u.params.n];
    step_slice(&u.entries, &mut entries, u.params.m);
    Tuple { params: u.params, entries }
}

/// `H(x_1, ..., x_n) = (x_2, ..., x_n, x_1)`.
pub fn rotate(u: &Tuple) -> Tuple {
    let mut entries = u.entries.clone();
    entries.rotate_left(1);
    Tuple { params: u.params, entries }
}

/// An element of `Z_m[y]/(y^n - 1)`; `coeffs[k]` is the coefficient of `y^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    coeffs: Vec<u64>,
}

impl RingElement {
    pub fn new(coeffs: Vec<u64>) -> Self {
        RingElement { coeffs }
    }

    pub fn one(n: usize) -> Self {
        let mut coeffs = vec![0; n];
        coeffs[0] = 1;
        RingElement { coeffs }
    }

    /// `y^k` reduced mod `y^n - 1`.
    pub fn monomial(n: usize, k: usize) -> Self {
        let mut coeffs = vec![0; n];
        coeffs[k % n] = 1;
        RingElement { coeffs }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Cyclic convolution mod `m`.
pub fn ring_mul(p: &RingElement, q: &RingElement, m: u64) -> RingElement {
    let n = p.coeffs.len();
    assert_eq!(n, q.coeffs.len(), "ring elements of different length");
    let m128 = m as u128;
    let mut acc = vec![0u128; n];
    for (i, &a) in p.coeffs.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in q.coeffs.iter().enumerate() {
            let k = if i + j >= n { i + j - n } else { i + j };
            // each term < m^2 < 2^128; reduce before the sum can overflow
            acc[k] = (acc[k] + (a as u128 * b as u128) % m128) % m128;
        }
    }
    RingElement { coeffs: acc.into_iter().map(|c| c as u64).collect() }
}

/// `base^e` by binary exponentiation.
pub fn ring_pow(base: &RingElement, mut e: u64, m: u64) -> RingElement {
    let n = base.coeffs.len();
    let mut acc = RingElement::one(n);
    acc.coeffs[0] %= m;
    let mut b = RingElement { coeffs: base.coeffs.iter().map(|&c| c % m).collect() };
    while e > 0 {
        if e & 1 == 1 {
            acc = ring_mul(&acc, &b, m);
        }
        e >>= 1;
        if e > 0 {
            b = ring_mul(&b, &b, m);
        }
    }
    acc
}

/// `(a_{d,1}, ..., a_{d,n})`: the coefficients of `(1 + y)^d`.
pub fn coeff_row(d: u64, params: Params) -> Vec<u64> {
    let mut gen = RingElement::one(params.n);
    gen.coeffs[1] = 1;
    ring_pow(&gen, d, params.m).coeffs
}

/// The polynomial of `D^k`: `(1 + y^{n-1})^k`.
pub fn step_power(k: u64, params: Params) -> RingElement {
    let mut gen = RingElement::one(params.n);
    gen.coeffs[params.n - 1] = add_mod(gen.coeffs[params.n - 1], 1, params.m);
    ring_pow(&gen, k, params.m)
}

/// `D^k(u)` in `O(n^2 log k)`.
pub fn ducci_apply(u: &Tuple, k: u64) -> Tuple {
    let p = step_power(k, u.params);
    apply_step_power(u, &p)
}

/// Multiplies the polynomial of `u` by a precomputed `step_power`.
pub fn apply_step_power(u: &Tuple, p: &RingElement) -> Tuple {
    let t = RingElement { coeffs: u.entries.clone() };
    Tuple { params: u.params, entries: ring_mul(&t, p, u.params.m).coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(n: usize, m: u64, xs: &[u64]) -> Tuple {
        Tuple::new(Params::new(n, m).unwrap(), xs.to_vec()).unwrap()
    }

    fn iterate(u: &Tuple, k: u64) -> Tuple {
        (0..k).fold(u.clone(), |acc, _| ducci_step(&acc))
    }

    #[test]
    fn step_examples() {
        assert_eq!(ducci_step(&t(3, 4, &[0, 0, 2])), t(3, 4, &[0, 2, 2]));
        assert_eq!(ducci_step(&t(3, 4, &[3, 1, 3])), t(3, 4, &[0, 0, 2]));
        let z = Params::new(6, 9).unwrap().zero();
        assert_eq!(ducci_step(&z), z);
    }

    #[test]
    fn rotate_examples() {
        assert_eq!(rotate(&t(3, 4, &[0, 0, 2])), t(3, 4, &[0, 2, 0]));
        let u = Params::new(5, 7).unwrap().uniform(3);
        assert_eq!(rotate(&u), u);
        let v = t(3, 10, &[1, 2, 3]);
        assert_eq!(rotate(&rotate(&rotate(&v))), v);
    }

    #[test]
    fn params_and_tuples_reject_bad_input() {
        assert!(Params::new(1, 5).is_err());
        assert!(Params::new(3, 1).is_err());
        let p = Params::new(3, 4).unwrap();
        assert!(Tuple::new(p, vec![0, 4, 0]).is_err());
        assert!(Tuple::new(p, vec![0, 1]).is_err());
    }

    #[test]
    fn ring_mul_examples() {
        let one_plus_y = RingElement::new(vec![1, 1, 0]);
        assert_eq!(ring_mul(&one_plus_y, &one_plus_y, 7).coeffs(), &[1, 2, 1]);
        let p = RingElement::new(vec![3, 5, 6]);
        assert_eq!(ring_mul(&p, &RingElement::one(3), 7), p);
        let top = RingElement::monomial(4, 3);
        let y = RingElement::monomial(4, 1);
        assert_eq!(ring_mul(&top, &y, 5), RingElement::one(4));
    }

    #[test]
    fn ring_pow_examples() {
        let one_plus_y = RingElement::new(vec![1, 1, 0]);
        assert_eq!(ring_pow(&one_plus_y, 3, 7).coeffs(), &[2, 3, 3]);
        assert_eq!(ring_pow(&one_plus_y, 5, 100).coeffs(), &[11, 10, 11]);
        assert_eq!(ring_pow(&RingElement::new(vec![4, 2, 9]), 0, 11), RingElement::one(3));
    }

    #[test]
    fn coeff_row_examples() {
        let p = Params::new(5, 7).unwrap();
        assert_eq!(coeff_row(40, p), vec![1, 2, 2, 2, 2]);
        assert_eq!(coeff_row(80, p), vec![3, 2, 2, 2, 2]);
        // below n the row is a binomial row
        let big = Params::new(9, 1_000_003).unwrap();
        for d in 0..9u64 {
            let row = coeff_row(d, big);
            for s in 0..9u64 {
                let mut binom = 1u64;
                for i in 0..s {
                    binom = binom * (d - i.min(d)) / (i + 1);
                }
                let expect = if s <= d { binom } else { 0 };
                assert_eq!(row[s as usize], expect, "d={d} s={s}");
            }
        }
    }

    #[test]
    fn small_table_of_n3_coefficients() {
        // (a_r, b_r, c_r) for r = 0..5
        let p = Params::new(3, 1 << 40).unwrap();
        let expect = [[1, 0, 0], [1, 1, 0], [1, 2, 1], [2, 3, 3], [5, 5, 6], [11, 10, 11]];
        for (r, row) in expect.iter().enumerate() {
            assert_eq!(coeff_row(r as u64, p), row.to_vec(), "r = {r}");
        }
    }

    #[test]
    fn apply_examples() {
        // sum-zero triple: D^2 = H
        let u = t(3, 10, &[2, 5, 3]);
        assert_eq!(ducci_apply(&u, 2), rotate(&u));
        // D^p doubles every tuple of Z_p^p
        for p in [3u64, 5, 7] {
            let params = Params::new(p as usize, p).unwrap();
            let u = Tuple::from_reduced(params, (0..p).map(|i| i * i + 1)).unwrap();
            assert_eq!(ducci_apply(&u, p), u.scale(2));
        }
        assert_eq!(ducci_apply(&u, 0), u);
    }

    #[test]
    fn state_index_round_trip_edges() {
        let p = Params::new(3, 4).unwrap();
        assert_eq!(t(3, 4, &[0, 0, 2]).state_index(), Some(2));
        assert_eq!(t(3, 4, &[3, 3, 3]).state_index(), Some(63));
        assert_eq!(Tuple::from_state_index(p, 63).unwrap(), t(3, 4, &[3, 3, 3]));
        assert!(Tuple::from_state_index(p, 64).is_err());
        assert_eq!(Params::new(64, 3).unwrap().state_count(), None);
    }

    fn params_and_tuple() -> impl Strategy<Value = (Tuple, Tuple)> {
        (2usize..10, 2u64..60).prop_flat_map(|(n, m)| {
            let p = Params::new(n, m).unwrap();
            (
                proptest::collection::vec(0..m, n),
                proptest::collection::vec(0..m, n),
            )
                .prop_map(move |(a, b)| (Tuple::new(p, a).unwrap(), Tuple::new(p, b).unwrap()))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn step_is_linear((u, v) in params_and_tuple()) {
            prop_assert_eq!(ducci_step(&u.add(&v)), ducci_step(&u).add(&ducci_step(&v)));
        }

        #[test]
        fn step_commutes_with_rotation((u, _v) in params_and_tuple()) {
            prop_assert_eq!(ducci_step(&rotate(&u)), rotate(&ducci_step(&u)));
        }

        #[test]
        fn apply_matches_iteration((u, _v) in params_and_tuple(), k in 0u64..200) {
            prop_assert_eq!(ducci_apply(&u, k), iterate(&u, k));
        }

        #[test]
        fn rows_follow_pascal_recurrence(n in 2usize..12, m in 2u64..1000, r in 1u64..500) {
            let p = Params::new(n, m).unwrap();
            let prev = coeff_row(r - 1, p);
            let row = coeff_row(r, p);
            for s in 0..n {
                let left = prev[(s + n - 1) % n];
                prop_assert_eq!(row[s], (prev[s] + left) % m);
            }
        }

        #[test]
        fn basic_sequence_reads_row_backwards(n in 2usize..10, m in 2u64..200, r in 0u64..1000) {
            let p = Params::new(n, m).unwrap();
            let row = coeff_row(r, p);
            let mut reversed = row.clone();
            reversed.reverse();
            prop_assert_eq!(ducci_apply(&p.basic(), r).into_entries(), reversed);
        }
    }
}
