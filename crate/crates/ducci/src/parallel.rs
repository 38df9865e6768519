//! Multi-threaded drivers for enumeration and stabilizer scans.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;

use ducci_core::fixed_space::exact_period_members;
use ducci_core::spectrum::{Enumerator, Tally, MAX_WORKER};
use ducci_core::symmetry::{check_degree, factorial, group_report, ClassIndex, DEFAULT_CLASS_LIMIT};
use ducci_core::{Enumeration, Error, GroupReport, MaxPeriodRecord, Params, Result, Tuple};

pub fn default_threads() -> usize {
    thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1)
}

fn chunk_size(count: u64, threads: usize) -> u64 {
    (count / (threads as u64 * 64)).clamp(1 << 12, 1 << 20)
}

/// Runs `work` on consecutive chunks of `0..count` from `threads` workers,
/// handing out chunks dynamically. Results come back in worker order.
fn run_chunks<T: Send>(
    count: u64,
    threads: usize,
    work: impl Fn(usize, std::ops::Range<u64>, &mut T) -> Result<()> + Sync,
    init: impl Fn() -> T + Sync,
) -> Result<Vec<T>> {
    let chunk = chunk_size(count, threads);
    let next = AtomicU64::new(0);
    thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let (next, work, init) = (&next, &work, &init);
                s.spawn(move || -> Result<T> {
                    let mut acc = init();
                    loop {
                        let start = next.fetch_add(chunk, Ordering::Relaxed);
                        if start >= count {
                            return Ok(acc);
                        }
                        work(w, start..(start + chunk).min(count), &mut acc)?;
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Internal("worker thread panicked".into()))))
            .collect()
    })
}

/// Exhaustive enumeration of `Z_m^n` on `threads` threads. The report does
/// not depend on the thread count.
pub fn enumerate(params: Params, record: MaxPeriodRecord, state_budget: u64, threads: usize) -> Result<Enumeration> {
    let threads = threads.clamp(1, MAX_WORKER as usize);
    let e = Enumerator::new(params, record, state_budget)?;
    let count = e.state_count();
    if threads == 1 {
        let parked = e.sweep(0..count, 0)?;
        e.resolve(&parked)?;
        let tally = e.tally(0..count)?;
        return e.finish(tally);
    }
    let parked = run_chunks(
        count,
        threads,
        |w, range, acc: &mut Vec<u64>| {
            acc.extend(e.sweep(range, w as u16 + 1)?);
            Ok(())
        },
        Vec::new,
    )?;
    e.resolve(&parked.concat())?;
    let tallies = run_chunks(
        count,
        threads,
        |_, range, acc: &mut Tally| {
            acc.merge(e.tally(range)?);
            Ok(())
        },
        Tally::default,
    )?;
    let mut total = Tally::default();
    for t in tallies {
        total.merge(t);
    }
    e.finish(total)
}

/// Every tuple with `Per(u) = d`, by fixed spaces when `m` is prime and
/// `L = 0`, else by enumeration.
pub fn class_members(
    params: Params,
    d: u64,
    record: MaxPeriodRecord,
    state_budget: u64,
    threads: usize,
) -> Result<Vec<Tuple>> {
    if d == 0 || !record.period.is_multiple_of(d) {
        return Ok(Vec::new());
    }
    if ducci_core::arith::is_prime(params.m()) && record.len == 0 {
        return exact_period_members(params, d, DEFAULT_CLASS_LIMIT);
    }
    let e = enumerate(params, record, state_budget, threads)?;
    Ok(e.class_filter(d).map(|(u, _)| u).collect())
}

/// Stabilizer of a set of tuples, scanning `S_n` on `threads` threads.
pub fn stabilizer_of(n: usize, d: u64, members: Vec<Tuple>, threads: usize) -> Result<GroupReport> {
    check_degree(n)?;
    if members.is_empty() {
        return Err(Error::EmptyClass { period: d });
    }
    let index = ClassIndex::new(n, members);
    let total = factorial(n);
    let threads = threads.max(1);
    let per = total.div_ceil(threads as u64).max(1);
    let ranks: Vec<u64> = thread::scope(|s| {
        let handles: Vec<_> = (0..threads as u64)
            .map(|w| {
                let index = &index;
                s.spawn(move || index.scan((w * per).min(total)..((w + 1) * per).min(total)))
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("scan thread panicked")).collect()
    });
    group_report(n, &ranks)
}

pub fn stabilizer(
    params: Params,
    d: u64,
    record: MaxPeriodRecord,
    state_budget: u64,
    threads: usize,
) -> Result<GroupReport> {
    check_degree(params.n())?;
    let members = class_members(params, d, record, state_budget, threads)?;
    stabilizer_of(params.n(), d, members, threads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ducci_core::spectrum::{EnumOptions, DEFAULT_STATE_BUDGET};
    use ducci_core::{brute_spectrum, max_period, DEFAULT_STEP_BUDGET};

    #[test]
    fn thread_count_does_not_change_the_report() {
        for (n, m) in [(4usize, 6u64), (5, 7), (6, 4), (3, 40)] {
            let p = Params::new(n, m).unwrap();
            let rec = max_period(p, DEFAULT_STEP_BUDGET).unwrap();
            let single = brute_spectrum(p, EnumOptions::default()).unwrap();
            for threads in [1, 2, 3, 8] {
                let multi = enumerate(p, rec, DEFAULT_STATE_BUDGET, threads).unwrap();
                assert_eq!(multi.report(), single.report(), "n={n} m={m} threads={threads}");
            }
        }
    }

    #[test]
    fn parallel_stabilizer_matches_core() {
        let p = Params::new(5, 11).unwrap();
        let rec = max_period(p, DEFAULT_STEP_BUDGET).unwrap();
        for threads in [1, 4] {
            let g = stabilizer(p, 5, rec, DEFAULT_STATE_BUDGET, threads).unwrap();
            assert_eq!(g, ducci_core::stabilizer(p, 5).unwrap());
        }
    }
}
