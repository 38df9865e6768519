//! Exhaustive period spectrum of `Z_m^n` by orbit walking.
//!
//! Every state gets a 16-bit label. A walk starts at an unvisited state,
//! claims each state it steps onto, and stops at the first state it cannot
//! claim:
//!
//! * a state claimed by the same walk closes a new cycle, whose length is
//!   the period of every state on the walk;
//! * a finished state hands its period to every state on the walk;
//! * a state held by another worker (or parked) parks the whole walk.
//!
//! Parked walks are reset and re-walked by a single thread once all
//! workers are done, so no state is ever counted twice and the result does
//! not depend on the number of workers. Each state is stepped from once,
//! except for parked states which are stepped from twice.
//!
//! Finished labels store the index of the period among the divisors of
//! `P_m(n)` plus a bit saying whether the state lies on its cycle.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::Range;
use core::sync::atomic::{AtomicU16, Ordering};

use crate::arith::divisors;
use crate::classify::{classify, ClassCounts, ClassTag, TupleClass};
use crate::cycle::{max_period, MaxPeriodRecord, DEFAULT_STEP_BUDGET};
use crate::fixed_space::{algebraic_spectrum, exact_period_members, SpectrumAlgebraic};
use crate::ring::{step_slice, Params, Tuple};
use crate::{Error, Result};

const UNVISITED: u16 = 0;
const PARKED: u16 = 0xFFFF;
const BUSY: u16 = 0x8000;
const ON_CYCLE: u16 = 0x4000;
const CLASS_MASK: u16 = 0x3FFF;

/// Largest worker id accepted by [`Enumerator::sweep`].
pub const MAX_WORKER: u16 = 0x7FFE;

/// Default cap on `m^n` for exhaustive enumeration.
pub const DEFAULT_STATE_BUDGET: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    /// Largest `m^n` that may be enumerated.
    pub state_budget: u64,
    /// Step budget for computing `P_m(n)` first.
    pub step_budget: u64,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { state_budget: DEFAULT_STATE_BUDGET, step_budget: DEFAULT_STEP_BUDGET }
    }
}

/// Period histograms of all of `Z_m^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumReport {
    pub params: Params,
    /// `P_m(n)`.
    pub period: u64,
    /// `L_m(n)`.
    pub len: u64,
    /// Period -> number of states lying on a cycle of that period.
    pub cycle_histogram: BTreeMap<u64, u64>,
    /// Period -> number of states whose sequence enters a cycle of that period.
    pub full_histogram: BTreeMap<u64, u64>,
    /// Period -> class buckets over the same states as `full_histogram`.
    pub class_breakdown: BTreeMap<u64, ClassCounts>,
}

impl SpectrumReport {
    pub fn state_count(&self) -> u64 {
        self.full_histogram.values().sum()
    }

    pub fn cycle_state_count(&self) -> u64 {
        self.cycle_histogram.values().sum()
    }

    /// Periods that occur, ascending.
    pub fn periods(&self) -> Vec<u64> {
        self.full_histogram.keys().copied().collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct ClassTally {
    full: u64,
    cycle: u64,
    classes: [u64; 4],
}

/// Per-period counts over a range of states; merge the tallies of all
/// ranges before calling [`Enumerator::finish`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    per_class: Vec<ClassTally>,
}

impl Tally {
    pub fn merge(&mut self, other: Tally) {
        if self.per_class.len() < other.per_class.len() {
            self.per_class.resize(other.per_class.len(), ClassTally::default());
        }
        for (mine, theirs) in self.per_class.iter_mut().zip(other.per_class) {
            mine.full += theirs.full;
            mine.cycle += theirs.cycle;
            for k in 0..4 {
                mine.classes[k] += theirs.classes[k];
            }
        }
    }
}

/// The shared label table. `sweep` may run concurrently from several
/// threads with distinct worker ids.
pub struct Enumerator {
    params: Params,
    record: MaxPeriodRecord,
    divisors: Vec<u64>,
    place: Vec<u64>,
    labels: Vec<AtomicU16>,
}

impl Enumerator {
    pub fn new(params: Params, record: MaxPeriodRecord, state_budget: u64) -> Result<Self> {
        if record.n != params.n() || record.m != params.m() {
            return Err(Error::InvalidParams("max-period record is for other parameters".into()));
        }
        let count = match params.state_count() {
            Some(c) if c <= state_budget => c,
            _ => return Err(Error::BudgetExceeded { what: "state count m^n", budget: state_budget }),
        };
        let count_usize = usize::try_from(count)
            .map_err(|_| Error::BudgetExceeded { what: "state count m^n", budget: usize::MAX as u64 })?;
        let divisors = divisors(record.period);
        if divisors.len() > CLASS_MASK as usize - 1 {
            return Err(Error::NotApplicable("maximal period has too many divisors for the label table"));
        }
        let n = params.n();
        let mut place = alloc::vec![1u64; n];
        for i in (0..n - 1).rev() {
            place[i] = place[i + 1] * params.m();
        }
        let labels = (0..count_usize).map(|_| AtomicU16::new(UNVISITED)).collect();
        Ok(Enumerator { params, record, divisors, place, labels })
    }

    pub fn state_count(&self) -> u64 {
        self.labels.len() as u64
    }

    pub fn params(&self) -> Params {
        self.params
    }

    fn decode(&self, mut index: u64, digits: &mut [u64]) {
        let m = self.params.m();
        for slot in digits.iter_mut().rev() {
            *slot = index % m;
            index /= m;
        }
    }

    #[inline]
    fn encode(&self, digits: &[u64]) -> u64 {
        digits.iter().zip(&self.place).map(|(d, p)| d * p).sum()
    }

    fn class_of(&self, period: u64) -> Result<u16> {
        self.divisors
            .binary_search(&period)
            .map(|k| k as u16 + 1)
            .map_err(|_| Error::Internal(alloc::format!("period {period} does not divide P = {}", self.record.period)))
    }

    /// Walks from every unvisited state in `starts`, in ascending order.
    /// Returns the states of walks that had to be parked.
    pub fn sweep(&self, starts: Range<u64>, worker: u16) -> Result<Vec<u64>> {
        if worker > MAX_WORKER {
            return Err(Error::InvalidParams(alloc::format!("worker id {worker} > {MAX_WORKER}")));
        }
        let busy = BUSY | worker;
        let n = self.params.n();
        let m = self.params.m();
        let mut parked = Vec::new();
        let mut stack: Vec<u64> = Vec::new();
        let mut digits = alloc::vec![0u64; n];
        let mut scratch = alloc::vec![0u64; n];

        for start in starts {
            let slot = &self.labels[start as usize];
            if slot.load(Ordering::Relaxed) != UNVISITED {
                continue;
            }
            if slot
                .compare_exchange(UNVISITED, busy, Ordering::AcqRel, Ordering::Acquire)
                .is_err()
            {
                continue;
            }
            stack.clear();
            stack.push(start);
            self.decode(start, &mut digits);
            loop {
                step_slice(&digits, &mut scratch, m);
                core::mem::swap(&mut digits, &mut scratch);
                let next = self.encode(&digits);
                let seen = match self.labels[next as usize].compare_exchange(
                    UNVISITED,
                    busy,
                    Ordering::AcqRel,
                    Ordering::Acquire,
                ) {
                    Ok(_) => {
                        stack.push(next);
                        continue;
                    }
                    Err(seen) => seen,
                };
                if seen == busy {
                    let pos = stack
                        .iter()
                        .rposition(|&s| s == next)
                        .expect("states held by this walk are on its stack");
                    let class = self.class_of((stack.len() - pos) as u64)?;
                    for &s in &stack[..pos] {
                        self.labels[s as usize].store(class, Ordering::Release);
                    }
                    for &s in &stack[pos..] {
                        self.labels[s as usize].store(class | ON_CYCLE, Ordering::Release);
                    }
                } else if seen & BUSY == 0 {
                    let class = seen & CLASS_MASK;
                    for &s in &stack {
                        self.labels[s as usize].store(class, Ordering::Release);
                    }
                } else {
                    for &s in &stack {
                        self.labels[s as usize].store(PARKED, Ordering::Release);
                    }
                    parked.extend_from_slice(&stack);
                }
                break;
            }
        }
        Ok(parked)
    }

    /// Re-walks parked states. Call only after every `sweep` has returned.
    pub fn resolve(&self, parked: &[u64]) -> Result<()> {
        for &s in parked {
            self.labels[s as usize].store(UNVISITED, Ordering::Release);
        }
        for &s in parked {
            let leftover = self.sweep(s..s + 1, 0)?;
            if !leftover.is_empty() {
                return Err(Error::Internal("single-threaded walk was parked".into()));
            }
        }
        Ok(())
    }

    /// Counts labels over `range`; every state in it must be finished.
    pub fn tally(&self, range: Range<u64>) -> Result<Tally> {
        let n = self.params.n();
        let m = self.params.m();
        let mut tally = Tally { per_class: alloc::vec![ClassTally::default(); self.divisors.len()] };
        if range.is_empty() {
            return Ok(tally);
        }
        let mut digits = alloc::vec![0u64; n];
        self.decode(range.start, &mut digits);
        let mut sum = digits.iter().fold(0u64, |acc, &d| (acc + d) % m);
        // uniform tuples sit at multiples of 1 + m + ... + m^{n-1}
        let rep: u64 = self.place.iter().sum();
        let mut next_uniform = range.start.div_ceil(rep).max(1) * rep;

        for index in range {
            let label = self.labels[index as usize].load(Ordering::Acquire);
            if label == UNVISITED || label & BUSY != 0 {
                return Err(Error::Internal(alloc::format!("state {index} was never finished")));
            }
            let entry = &mut tally.per_class[(label & CLASS_MASK) as usize - 1];
            entry.full += 1;
            if label & ON_CYCLE != 0 {
                entry.cycle += 1;
            }
            let tag = if index == 0 {
                ClassTag::Zero
            } else if index == next_uniform {
                next_uniform += rep;
                ClassTag::Uniform
            } else if sum == 0 {
                ClassTag::Sum
            } else {
                ClassTag::Other
            };
            entry.classes[tag as usize] += 1;

            // advance the odometer; each wrapped digit changes the sum by 1 - m
            let mut k = n;
            let mut bump = 1;
            while k > 0 {
                k -= 1;
                digits[k] += 1;
                if digits[k] < m {
                    break;
                }
                digits[k] = 0;
                bump += 1;
            }
            sum = ((sum as u128 + bump as u128) % m as u128) as u64;
        }
        Ok(tally)
    }

    pub fn finish(self, tally: Tally) -> Result<Enumeration> {
        let mut report = SpectrumReport {
            params: self.params,
            period: self.record.period,
            len: self.record.len,
            cycle_histogram: BTreeMap::new(),
            full_histogram: BTreeMap::new(),
            class_breakdown: BTreeMap::new(),
        };
        for (k, t) in tally.per_class.iter().enumerate() {
            if t.full == 0 {
                continue;
            }
            let d = self.divisors[k];
            report.full_histogram.insert(d, t.full);
            if t.cycle > 0 {
                report.cycle_histogram.insert(d, t.cycle);
            }
            let mut counts = ClassCounts::default();
            for tag in ClassTag::ALL {
                counts.add(tag, t.classes[tag as usize] as u128);
            }
            report.class_breakdown.insert(d, counts);
        }
        if report.state_count() != self.state_count() {
            return Err(Error::Internal("tally does not cover every state".into()));
        }
        let labels = self.labels.into_iter().map(AtomicU16::into_inner).collect();
        Ok(Enumeration { params: self.params, divisors: self.divisors, labels, report })
    }
}

/// A finished enumeration: the report plus the per-state labels, which
/// answer membership queries for period classes.
pub struct Enumeration {
    params: Params,
    divisors: Vec<u64>,
    labels: Vec<u16>,
    report: SpectrumReport,
}

impl Enumeration {
    pub fn report(&self) -> &SpectrumReport {
        &self.report
    }

    pub fn into_report(self) -> SpectrumReport {
        self.report
    }

    pub fn params(&self) -> Params {
        self.params
    }

    /// `(Per(u), u lies on its cycle)` for the state with this index.
    pub fn period_of_index(&self, index: u64) -> (u64, bool) {
        let label = self.labels[index as usize];
        (self.divisors[(label & CLASS_MASK) as usize - 1], label & ON_CYCLE != 0)
    }

    pub fn period_of(&self, u: &Tuple) -> Option<u64> {
        if u.params() != self.params {
            return None;
        }
        Some(self.period_of_index(u.state_index()?).0)
    }

    /// State indices with period exactly `d`, ascending.
    pub fn indices_with_period(&self, d: u64) -> impl Iterator<Item = u64> + '_ {
        let class = self.divisors.binary_search(&d).ok().map(|k| k as u16 + 1);
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, &l)| Some(l & CLASS_MASK) == class)
            .map(|(i, _)| i as u64)
    }

    /// Every tuple with period exactly `d`, in ascending state order, with
    /// its class.
    pub fn class_filter(&self, d: u64) -> impl Iterator<Item = (Tuple, TupleClass)> + '_ {
        self.indices_with_period(d).map(move |i| {
            let u = Tuple::from_state_index(self.params, i).expect("index in range");
            let class = classify(&u);
            (u, class)
        })
    }

    /// First tuple on a cycle of period `d`, if any.
    pub fn first_cycle_tuple(&self, d: u64) -> Option<Tuple> {
        self.indices_with_period(d)
            .find(|&i| self.period_of_index(i).1)
            .map(|i| Tuple::from_state_index(self.params, i).expect("index in range"))
    }
}

/// Single-threaded exhaustive enumeration.
pub fn brute_spectrum(params: Params, opts: EnumOptions) -> Result<Enumeration> {
    let record = max_period(params, opts.step_budget)?;
    let enumerator = Enumerator::new(params, record, opts.state_budget)?;
    let all = 0..enumerator.state_count();
    let parked = enumerator.sweep(all.clone(), 0)?;
    enumerator.resolve(&parked)?;
    let tally = enumerator.tally(all)?;
    enumerator.finish(tally)
}

/// Checks that the algebraic exact-period counts equal the brute-force
/// cycle histogram; on mismatch the error carries a tuple of the
/// disputed period.
pub fn compare_spectra(brute: &Enumeration, algebraic: &SpectrumAlgebraic) -> Result<()> {
    let report = brute.report();
    if algebraic.params != report.params || algebraic.period != report.period {
        return Err(Error::InvalidParams("spectra are for different parameters".into()));
    }
    let counts = algebraic.counts();
    let keys: alloc::collections::BTreeSet<u64> =
        counts.keys().chain(report.cycle_histogram.keys()).copied().collect();
    for d in keys {
        let brute_count = report.cycle_histogram.get(&d).copied().unwrap_or(0) as u128;
        let alg_count = counts.get(&d).copied().unwrap_or(0);
        if brute_count != alg_count {
            let witness = brute.first_cycle_tuple(d).or_else(|| {
                exact_period_members(report.params, d, 1 << 20).ok().and_then(|v| v.into_iter().next())
            });
            return Err(Error::Mismatch {
                what: alloc::format!("period {d}: enumeration counts {brute_count}, fixed spaces give {alg_count}"),
                witness,
            });
        }
    }
    Ok(())
}

/// Runs both methods (single-threaded) and cross-checks them.
pub fn spectrum_compare(params: Params, opts: EnumOptions) -> Result<(Enumeration, SpectrumAlgebraic)> {
    let brute = brute_spectrum(params, opts)?;
    let algebraic = algebraic_spectrum(params, brute.report().period)?;
    compare_spectra(&brute, &algebraic)?;
    Ok((brute, algebraic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ducci_step;
    use alloc::vec;
    use std::collections::HashMap;

    fn p(n: usize, m: u64) -> Params {
        Params::new(n, m).unwrap()
    }

    /// Per-tuple iteration with a visited map; independent of the walker.
    fn oracle(params: Params) -> (BTreeMap<u64, u64>, BTreeMap<u64, u64>) {
        let mut full = BTreeMap::new();
        let mut cycle = BTreeMap::new();
        for i in 0..params.state_count().unwrap() {
            let u = Tuple::from_state_index(params, i).unwrap();
            let mut seen = HashMap::new();
            let mut v = u.clone();
            let mut k = 0u64;
            let (first, per) = loop {
                if let Some(&f) = seen.get(&v) {
                    break (f, k - f);
                }
                seen.insert(v.clone(), k);
                v = ducci_step(&v);
                k += 1;
            };
            *full.entry(per).or_insert(0) += 1;
            if first == 0 {
                *cycle.entry(per).or_insert(0) += 1;
            }
        }
        (full, cycle)
    }

    #[test]
    fn matches_oracle_on_small_spaces() {
        for (n, m) in [(2usize, 2u64), (2, 3), (3, 3), (3, 4), (3, 6), (4, 4), (4, 3), (5, 2), (6, 2), (3, 12), (4, 6)] {
            let e = brute_spectrum(p(n, m), EnumOptions::default()).unwrap();
            let (full, cycle) = oracle(p(n, m));
            assert_eq!(e.report().full_histogram, full, "n={n} m={m}");
            assert_eq!(e.report().cycle_histogram, cycle, "n={n} m={m}");
        }
    }

    #[test]
    fn z3_cubed() {
        let e = brute_spectrum(p(3, 3), EnumOptions::default()).unwrap();
        let got: Vec<(u64, u64)> = e.report().full_histogram.clone().into_iter().collect();
        assert_eq!(got, vec![(1, 1), (2, 2), (6, 24)]);
    }

    #[test]
    fn z4_cubed_has_the_three_cycle() {
        let e = brute_spectrum(p(3, 4), EnumOptions::default()).unwrap();
        for xs in [[0, 2, 2], [2, 0, 2], [2, 2, 0]] {
            let u = Tuple::new(p(3, 4), xs.to_vec()).unwrap();
            let idx = u.state_index().unwrap();
            assert_eq!(e.period_of_index(idx), (3, true));
        }
        let (_, on_cycle) = e.period_of_index(Tuple::new(p(3, 4), vec![0, 0, 2]).unwrap().state_index().unwrap());
        assert!(!on_cycle);
    }

    #[test]
    fn class_breakdown_sums_to_histogram() {
        let e = brute_spectrum(p(4, 6), EnumOptions::default()).unwrap();
        let r = e.report();
        for (d, counts) in &r.class_breakdown {
            assert_eq!(counts.total(), r.full_histogram[d] as u128);
        }
        assert_eq!(r.class_breakdown[&1].zero, 1);
        let uniform: u128 = r.class_breakdown.values().map(|c| c.uniform).sum();
        assert_eq!(uniform, 5);
        let sum: u128 = r.class_breakdown.values().map(|c| c.sum + c.zero).sum();
        // 6^3 tuples sum to zero; (3,3,3,3) is the only uniform one
        assert_eq!(sum, 6u128.pow(3) - 1);
    }

    #[test]
    fn class_filter_lists_period_class() {
        let e = brute_spectrum(p(5, 11), EnumOptions::default()).unwrap();
        let two: Vec<_> = e.class_filter(2).collect();
        assert_eq!(two.len(), 10);
        let base = Tuple::new(p(5, 11), vec![1, 9, 4, 3, 5]).unwrap();
        for (u, class) in &two {
            assert!((1..11).any(|z| base.scale(z) == *u));
            assert!(class.satisfies_sum);
        }
        assert!(two.windows(2).all(|w| w[0].0 < w[1].0));
        let ones: Vec<_> = e.class_filter(1).map(|(u, _)| u).collect();
        assert_eq!(ones, vec![p(5, 11).zero()]);
    }

    #[test]
    fn parked_walks_resolve_to_the_same_report() {
        // Interleave two "workers" by hand so walks collide.
        let params = p(4, 5);
        let rec = max_period(params, DEFAULT_STEP_BUDGET).unwrap();
        let e = Enumerator::new(params, rec, 1 << 20).unwrap();
        let count = e.state_count();
        let mut parked = Vec::new();
        let chunk = 7;
        let mut start = 0;
        let mut worker = 1;
        while start < count {
            let end = (start + chunk).min(count);
            parked.extend(e.sweep(start..end, worker).unwrap());
            worker = 3 - worker;
            start = end;
        }
        e.resolve(&parked).unwrap();
        let tally = e.tally(0..count).unwrap();
        let got = e.finish(tally).unwrap();
        let expect = brute_spectrum(params, EnumOptions::default()).unwrap();
        assert_eq!(got.report(), expect.report());
    }

    #[test]
    fn collisions_with_busy_states_park() {
        let params = p(3, 3);
        let rec = max_period(params, DEFAULT_STEP_BUDGET).unwrap();
        let e = Enumerator::new(params, rec, 1 << 20).unwrap();
        // pretend worker 5 holds state 1 mid-walk
        e.labels[1].store(BUSY | 5, Ordering::Relaxed);
        let parked = e.sweep(0..27, 1).unwrap();
        assert!(!parked.is_empty());
        let mut all_parked = parked.clone();
        all_parked.push(1);
        e.resolve(&all_parked).unwrap();
        let tally = e_tally(&e);
        let got = e.finish(tally).unwrap();
        let (full, _) = oracle(params);
        assert_eq!(got.report().full_histogram, full);
    }

    fn e_tally(e: &Enumerator) -> Tally {
        e.tally(0..e.state_count()).unwrap()
    }

    #[test]
    fn tally_over_split_ranges_merges() {
        let params = p(3, 7);
        let rec = max_period(params, DEFAULT_STEP_BUDGET).unwrap();
        let e = Enumerator::new(params, rec, 1 << 20).unwrap();
        e.sweep(0..343, 0).unwrap();
        let whole = e.tally(0..343).unwrap();
        let mut parts = Tally::default();
        for r in [0..1, 1..57, 57..200, 200..343] {
            parts.merge(e.tally(r).unwrap());
        }
        assert_eq!(whole, parts);
    }

    #[test]
    fn state_budget_is_enforced() {
        let opts = EnumOptions { state_budget: 100, ..EnumOptions::default() };
        assert!(matches!(brute_spectrum(p(3, 5), opts), Err(Error::BudgetExceeded { .. })));
        assert!(brute_spectrum(p(2, 10), opts).is_ok());
    }

    #[test]
    fn compare_agrees_on_prime_cases() {
        for (n, m) in [(2usize, 3u64), (3, 5), (5, 7), (5, 5), (4, 3), (6, 5), (5, 11)] {
            let (brute, alg) = spectrum_compare(p(n, m), EnumOptions::default()).unwrap();
            if brute.report().len == 0 {
                for e in alg.divisors.iter().filter(|e| e.exact_count > 0) {
                    assert_eq!(brute.report().class_breakdown[&e.d], e.exact_classes, "n={n} m={m} d={}", e.d);
                }
            }
        }
    }

    #[test]
    fn compare_reports_a_witness() {
        let (brute, mut alg) = spectrum_compare(p(5, 7), EnumOptions::default()).unwrap();
        let entry = alg.divisors.iter_mut().find(|e| e.d == 80).unwrap();
        entry.exact_count -= 1;
        match compare_spectra(&brute, &alg) {
            Err(Error::Mismatch { witness: Some(w), .. }) => {
                assert_eq!(crate::cycle::find_cycle(&w, 1000).unwrap().per, 80);
            }
            other => panic!("expected a mismatch, got {other:?}"),
        }
    }
}
