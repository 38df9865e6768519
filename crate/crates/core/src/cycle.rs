//! Pre-period and period of a single Ducci sequence.
//!
//! `find_cycle` uses Brent's power-of-two search, so it keeps three tuples in
//! memory regardless of how long the orbit is.

use alloc::vec::Vec;

use crate::ring::{apply_step_power, step_power, step_slice, Params, Tuple};
use crate::{Error, Result};

/// Covers every maximal period listed in the reference tables.
pub const DEFAULT_STEP_BUDGET: u64 = 1 << 28;

/// `len` is the pre-period `Len(u)`, `per` the period `Per(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CycleInfo {
    pub len: u64,
    pub per: u64,
}

/// `L = L_m(n)` and `P = P_m(n)`, the pre-period and period of `(0, ..., 0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MaxPeriodRecord {
    pub n: usize,
    pub m: u64,
    pub len: u64,
    pub period: u64,
}

impl MaxPeriodRecord {
    pub fn params(&self) -> Result<Params> {
        Params::new(self.n, self.m)
    }
}

struct Walker {
    cur: Vec<u64>,
    scratch: Vec<u64>,
    m: u64,
}

impl Walker {
    fn new(start: &[u64], m: u64) -> Self {
        Walker { cur: start.to_vec(), scratch: alloc::vec![0; start.len()], m }
    }

    #[inline]
    fn step(&mut self) {
        step_slice(&self.cur, &mut self.scratch, self.m);
        core::mem::swap(&mut self.cur, &mut self.scratch);
    }
}

/// Minimal `(len, per)` with `D^{len+per}(u) = D^len(u)`.
///
/// Fails with `BudgetExceeded` exactly when `len + per > budget`; at most
/// about `3 * budget` steps are spent before giving up.
pub fn find_cycle(u: &Tuple, budget: u64) -> Result<CycleInfo> {
    if budget == 0 {
        return Err(Error::InvalidParams("step budget must be at least 1".into()));
    }
    let exceeded = || Error::BudgetExceeded { what: "pre-period plus period", budget };
    let m = u.params().m();
    let limit = budget.saturating_mul(3);

    // Phase 1: the tortoise sits at positions 2^k - 1, the hare runs ahead
    // at most 2^k steps. They meet once 2^k >= per and 2^k - 1 >= len, which
    // happens before the hare passes position 3 * (len + per).
    let mut tortoise = u.entries().to_vec();
    let mut hare = Walker::new(u.entries(), m);
    hare.step();
    let mut hare_pos = 1u64;
    let mut power = 1u64;
    let mut per = 1u64;
    while tortoise != hare.cur {
        if hare_pos >= limit {
            return Err(exceeded());
        }
        if power == per {
            tortoise.copy_from_slice(&hare.cur);
            power *= 2;
            per = 0;
        }
        hare.step();
        hare_pos += 1;
        per += 1;
    }

    // Phase 2: two walkers `per` apart meet at the start of the cycle.
    let mut lead = Walker::new(u.entries(), m);
    for _ in 0..per {
        lead.step();
    }
    let mut trail = Walker::new(u.entries(), m);
    let mut len = 0u64;
    while trail.cur != lead.cur {
        trail.step();
        lead.step();
        len += 1;
        if len + per > budget {
            return Err(exceeded());
        }
    }
    if len + per > budget {
        return Err(exceeded());
    }
    Ok(CycleInfo { len, per })
}

/// `find_cycle` on the basic tuple `(0, ..., 0, 1)`.
pub fn max_period(params: Params, budget: u64) -> Result<MaxPeriodRecord> {
    let info = find_cycle(&params.basic(), budget)?;
    Ok(MaxPeriodRecord { n: params.n(), m: params.m(), len: info.len, period: info.per })
}

/// Given `D^multiple(u) = u`, returns the smallest divisor `d` of `multiple`
/// with `D^d(u) = u`, which is `Per(u)`.
pub fn exact_period_of_fixed(u: &Tuple, multiple: u64) -> Result<u64> {
    if multiple == 0 {
        return Err(Error::InvalidParams("multiple must be positive".into()));
    }
    let params = u.params();
    if apply_step_power(u, &step_power(multiple, params)) != *u {
        return Err(Error::NotFixed { multiple });
    }
    Ok(period_dividing(u, multiple))
}

/// Period of a tuple already known to lie on a cycle whose period divides
/// `multiple`, found by peeling prime factors off `multiple`.
pub(crate) fn period_dividing(u: &Tuple, multiple: u64) -> u64 {
    let params = u.params();
    let mut period = multiple;
    for (q, _) in crate::arith::factorize(multiple) {
        while period.is_multiple_of(q) && apply_step_power(u, &step_power(period / q, params)) == *u {
            period /= q;
        }
    }
    period
}
