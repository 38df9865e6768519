//! Fixed spaces `{u : D^d(u) = u}` over a prime modulus and exact period
//! counts by Möbius inversion over the divisors of the maximal period.
//!
//! Entry `i` of `D^d(u)` is `Σ_s a_{d,s} u_{i+s-1}`, so `D^d(u) = u` is the
//! linear system whose row `i` is the coefficient row shifted right by `i`
//! minus the identity. Over a prime field its solution set has `m^f`
//! elements, `f` the nullity. A tuple fixed by `D^d` lies on a cycle whose
//! period divides `d`, so `m^{f(d)} = Σ_{e | d} N(e)` where `N(e)` counts
//! cycle tuples of exact period `e`, and inverting gives `N`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::arith::{checked_pow_u128, divisors, factorize, is_prime, mobius, sub_mod};
use crate::classify::{ClassCounts, ClassTag};
use crate::linalg::ModMatrix;
use crate::ring::{coeff_row, Params, Tuple};
use crate::{Error, Result};

/// The matrix of `D^d - I`: entry `(i, j)` is `a_{d, j-i+1} - [i = j]`,
/// indices mod `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CirculantSystem {
    pub d: u64,
    pub params: Params,
    pub matrix: ModMatrix,
}

impl CirculantSystem {
    /// Whether `D^d(u) = u`.
    pub fn is_solution(&self, u: &[u64]) -> bool {
        self.matrix.mul_vec(u).iter().all(|&x| x == 0)
    }
}

pub fn build_system(d: u64, params: Params) -> CirculantSystem {
    let n = params.n();
    let m = params.m();
    let row = coeff_row(d, params);
    let matrix = ModMatrix::from_fn(n, n, m, |i, j| {
        let a = row[(j + n - i) % n];
        if i == j {
            sub_mod(a, 1, m)
        } else {
            a
        }
    });
    CirculantSystem { d, params, matrix }
}

/// Solutions of `D^d(u) = u` for prime `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedSpace {
    pub d: u64,
    pub params: Params,
    /// Nullity of the system; the space has `m^dimension` elements.
    pub dimension: usize,
    /// Reduced-echelon basis, one vector per free column.
    pub basis: Vec<Tuple>,
    /// Every solution bucketed by zero / uniform / sum condition / other.
    pub classes: ClassCounts,
}

impl FixedSpace {
    pub fn size(&self) -> Result<u128> {
        count_pow(self.params.m(), self.dimension)
    }

    /// All `m^dimension` solutions, or `BudgetExceeded` past `limit`.
    pub fn elements(&self, limit: u64) -> Result<Vec<Tuple>> {
        let size = self.size()?;
        if size > limit as u128 {
            return Err(Error::BudgetExceeded { what: "fixed-space size", budget: limit });
        }
        let m = self.params.m();
        let n = self.params.n();
        let f = self.dimension;
        let mut out = Vec::with_capacity(size as usize);
        let mut coeffs = alloc::vec![0u64; f];
        loop {
            let mut v = alloc::vec![0u64; n];
            for (c, b) in coeffs.iter().zip(&self.basis) {
                if *c == 0 {
                    continue;
                }
                for (slot, &x) in v.iter_mut().zip(b.entries()) {
                    *slot = ((*slot as u128 + *c as u128 * x as u128) % m as u128) as u64;
                }
            }
            out.push(Tuple::new(self.params, v)?);
            // odometer over the coefficient vector
            let mut k = 0;
            while k < f {
                coeffs[k] += 1;
                if coeffs[k] < m {
                    break;
                }
                coeffs[k] = 0;
                k += 1;
            }
            if k == f {
                break;
            }
        }
        Ok(out)
    }
}

fn count_pow(m: u64, f: usize) -> Result<u128> {
    u32::try_from(f)
        .ok()
        .and_then(|f| checked_pow_u128(m, f))
        .ok_or_else(|| Error::InvalidParams(alloc::format!("{m}^{f} overflows a 128-bit count")))
}

fn require_prime(m: u64) -> Result<()> {
    if is_prime(m) {
        Ok(())
    } else {
        Err(Error::CompositeModulus(m))
    }
}

pub fn nullspace(sys: &CirculantSystem) -> Result<FixedSpace> {
    let params = sys.params;
    let m = params.m();
    let n = params.n();
    require_prime(m)?;
    let basis: Vec<Tuple> = sys
        .matrix
        .nullspace()
        .into_iter()
        .map(|v| Tuple::new(params, v))
        .collect::<Result<_>>()?;
    let dimension = basis.len();
    let total = count_pow(m, dimension)?;

    // Closed-form bucket sizes. The uniform tuples in the space are either
    // all m - 1 of them or none; the sum-zero part is the whole space or a
    // hyperplane of it.
    let ones_fixed = sys.is_solution(&alloc::vec![1; n]);
    let inside_sum = basis.iter().all(|b| b.entry_sum() == 0);
    let sum_part = if inside_sum { total } else { total / m as u128 };
    let uniform = if ones_fixed { (m - 1) as u128 } else { 0 };
    let uniform_with_sum = if ones_fixed && (n as u64).is_multiple_of(m) { uniform } else { 0 };
    let classes = ClassCounts {
        zero: 1,
        uniform,
        sum: sum_part - 1 - uniform_with_sum,
        other: total - sum_part - (uniform - uniform_with_sum),
    };
    Ok(FixedSpace { d: sys.d, params, dimension, basis, classes })
}

/// Per-divisor line of an algebraic spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorEntry {
    pub d: u64,
    /// Nullity `f(d)`.
    pub dimension: usize,
    /// Number of cycle tuples whose period is exactly `d`.
    pub exact_count: u128,
    /// Class counts over the whole fixed space at `d`.
    pub classes: ClassCounts,
    /// Class counts over the tuples of period exactly `d`.
    pub exact_classes: ClassCounts,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumAlgebraic {
    pub params: Params,
    pub period: u64,
    /// One entry per divisor of `period`, ascending.
    pub divisors: Vec<DivisorEntry>,
}

impl SpectrumAlgebraic {
    /// Nonzero exact-period counts.
    pub fn counts(&self) -> BTreeMap<u64, u128> {
        self.divisors
            .iter()
            .filter(|e| e.exact_count > 0)
            .map(|e| (e.d, e.exact_count))
            .collect()
    }

    /// Number of cycle tuples, `m^{f(P)}`.
    pub fn cycle_tuples(&self) -> Result<u128> {
        let last = self.divisors.last().expect("at least the divisor 1");
        count_pow(self.params.m(), last.dimension)
    }

    pub fn entry(&self, d: u64) -> Option<&DivisorEntry> {
        self.divisors.iter().find(|e| e.d == d)
    }
}

/// Exact-period counts of cycle tuples for prime `m`, given `period = P_m(n)`.
pub fn algebraic_spectrum(params: Params, period: u64) -> Result<SpectrumAlgebraic> {
    require_prime(params.m())?;
    if period == 0 {
        return Err(Error::InvalidParams("period must be positive".into()));
    }
    let m = params.m();
    let divs = divisors(period);
    let spaces: Vec<FixedSpace> = divs
        .iter()
        .map(|&d| nullspace(&build_system(d, params)))
        .collect::<Result<_>>()?;
    let sizes: Vec<u128> = spaces.iter().map(|s| count_pow(m, s.dimension)).collect::<Result<_>>()?;

    let mut entries = Vec::with_capacity(divs.len());
    for (k, &d) in divs.iter().enumerate() {
        // positive and negative Möbius terms are summed apart to stay unsigned
        let invert = |value: &dyn Fn(usize) -> u128| -> Result<u128> {
            let mut plus = 0u128;
            let mut minus = 0u128;
            for (j, &e) in divs[..=k].iter().enumerate() {
                if d % e != 0 {
                    continue;
                }
                match mobius(d / e) {
                    1 => plus += value(j),
                    -1 => minus += value(j),
                    _ => {}
                }
            }
            plus.checked_sub(minus)
                .ok_or_else(|| Error::Internal(alloc::format!("negative exact-period count at d = {d}")))
        };
        let exact_count = invert(&|j| sizes[j])?;
        let mut exact_classes = ClassCounts::default();
        for tag in ClassTag::ALL {
            exact_classes.add(tag, invert(&|j| spaces[j].classes.get(tag))?);
        }
        entries.push(DivisorEntry {
            d,
            dimension: spaces[k].dimension,
            exact_count,
            classes: spaces[k].classes,
            exact_classes,
        });
    }
    let total: u128 = entries.iter().map(|e| e.exact_count).sum();
    if total != *sizes.last().expect("nonempty") {
        return Err(Error::Internal("exact-period counts do not add up".into()));
    }
    Ok(SpectrumAlgebraic { params, period, divisors: entries })
}

/// Cycle tuples of exact period `d`, in ascending state order, for prime
/// `m`. Enumerates the fixed space at `d` (failing past `limit` elements)
/// and drops tuples fixed at `d / q` for a prime `q | d`.
pub fn exact_period_members(params: Params, d: u64, limit: u64) -> Result<Vec<Tuple>> {
    require_prime(params.m())?;
    if d == 0 {
        return Err(Error::InvalidParams("period must be positive".into()));
    }
    let space = nullspace(&build_system(d, params))?;
    let smaller: Vec<CirculantSystem> =
        factorize(d).into_iter().map(|(q, _)| build_system(d / q, params)).collect();
    let mut members: Vec<Tuple> = space
        .elements(limit)?
        .into_iter()
        .filter(|u| !smaller.iter().any(|s| s.is_solution(u.entries())))
        .collect();
    members.sort();
    Ok(members)
}
