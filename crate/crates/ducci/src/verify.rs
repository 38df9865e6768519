//! Checkers for the structural results about Ducci periods. Each returns a
//! [`CheckResult`]; a failure carries the smallest counterexample found.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::RangeInclusive;
use std::time::Instant;

use ducci_core::arith::{is_prime, multiplicative_order};
use ducci_core::fixed_space::{algebraic_spectrum, nullspace, SpectrumAlgebraic};
use ducci_core::linalg::{int_determinant, pattern_matrix};
use ducci_core::spectrum::compare_spectra;
use ducci_core::{
    coeff_row, ducci_apply, ducci_step, find_cycle, rotate, sum_triple_period, uniform_period, build_system,
    ClassTag, Error, MaxPeriodRecord, Params, Tuple, UniformPeriod, DEFAULT_STEP_BUDGET,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cache::{cached_max_period, Cache};
use crate::parallel::enumerate;

pub const DEFAULT_SEED: u64 = 0xD0CC1;
/// Full enumeration is used up to this many states by default.
pub const DEFAULT_ENUM_BUDGET: u64 = 1_000_000;
pub const DEFAULT_CASES: usize = 1000;
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub range: String,
    pub passed: bool,
    /// Some inputs were drawn at random rather than enumerated.
    pub sampled: bool,
    pub seed: Option<u64>,
    pub cases: u64,
    pub witness: Option<String>,
    pub elapsed_ms: u128,
}

impl CheckResult {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "range": self.range,
            "passed": self.passed,
            "sampled": self.sampled,
            "seed": self.seed,
            "cases": self.cases,
            "witness": self.witness,
            "elapsed_ms": self.elapsed_ms as u64,
        })
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {} [{}] cases={} {}ms", self.name, self.range, self.cases, self.elapsed_ms)?;
        if self.sampled {
            write!(f, " sampled(seed={})", self.seed.unwrap_or_default())?;
        }
        if let Some(w) = &self.witness {
            write!(f, "\n  witness: {w}")?;
        }
        Ok(())
    }
}

/// What a check body reports back.
struct Outcome {
    cases: u64,
    sampled: bool,
    witness: Option<String>,
}

impl Outcome {
    fn pass(cases: u64) -> Self {
        Outcome { cases, sampled: false, witness: None }
    }
}

fn timed(name: &str, range: String, seed: Option<u64>, body: impl FnOnce() -> Outcome) -> CheckResult {
    let start = Instant::now();
    let out = body();
    CheckResult {
        name: name.to_string(),
        range,
        passed: out.witness.is_none(),
        sampled: out.sampled,
        seed: if out.sampled { seed } else { None },
        cases: out.cases,
        witness: out.witness,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

fn params(n: usize, m: u64) -> Params {
    Params::new(n, m).expect("checker parameters are valid")
}

fn tuple(p: Params, xs: Vec<u64>) -> Tuple {
    Tuple::new(p, xs).expect("entries reduced")
}

fn random_tuple(rng: &mut ChaCha8Rng, p: Params) -> Tuple {
    tuple(p, (0..p.n()).map(|_| rng.gen_range(0..p.m())).collect())
}

/// Smallest failure among a batch of random cases, ordered by `key`.
fn keep_min<K: Ord>(slot: &mut Option<(K, String)>, key: K, msg: String) {
    if slot.as_ref().is_none_or(|(k, _)| key < *k) {
        *slot = Some((key, msg));
    }
}

/// Options shared by the suites.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Replaces the upper end of every modulus range.
    pub max_m: Option<u64>,
    /// Largest `m^n` enumerated exhaustively.
    pub state_budget: u64,
    pub seed: u64,
    pub threads: usize,
    pub cache: Option<Cache>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_m: None, state_budget: DEFAULT_ENUM_BUDGET, seed: DEFAULT_SEED, threads: 1, cache: None }
    }
}

impl VerifyOptions {
    fn m_range(&self, lo: u64, default_hi: u64) -> RangeInclusive<u64> {
        lo..=self.max_m.unwrap_or(default_hi)
    }

    fn record(&self, p: Params) -> ducci_core::Result<MaxPeriodRecord> {
        cached_max_period(self.cache.as_ref(), p, DEFAULT_STEP_BUDGET)
    }
}

fn range_text(r: &RangeInclusive<u64>) -> String {
    format!("{}..={}", r.start(), r.end())
}

/// All five clauses about triples with entry sum `0 mod m`. Every triple is
/// checked for `m <= 30`; larger moduli are sampled.
pub fn check_sum_triples(ms: RangeInclusive<u64>, samples: usize, seed: u64) -> CheckResult {
    timed("sum-triples", format!("n=3, m in {}", range_text(&ms)), Some(seed), || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cases = 0;
        let mut sampled = false;
        for m in ms.clone().filter(|&m| m >= 2) {
            let p = params(3, m);
            let pairs: Vec<(u64, u64)> = if m <= 30 {
                (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect()
            } else {
                sampled = true;
                (0..samples).map(|_| (rng.gen_range(0..m), rng.gen_range(0..m))).collect()
            };
            let mut sorted = pairs;
            sorted.sort_unstable();
            for (a, b) in sorted {
                cases += 1;
                let u = tuple(p, vec![a, b, (2 * m - a - b) % m]);
                if let Some(why) = sum_triple_violation(&u) {
                    return Outcome { cases, sampled, witness: Some(format!("m={m} u={u}: {why}")) };
                }
            }
        }
        Outcome { cases, sampled, witness: None }
    })
}

fn sum_triple_violation(u: &Tuple) -> Option<String> {
    let m = u.params().m();
    let xs = u.entries();
    let d1 = ducci_step(u);
    if d1.entry_sum() != 0 {
        return Some(format!("D(u) = {d1} leaves the sum condition"));
    }
    if ducci_step(&d1) != rotate(u) {
        return Some("D^2(u) != H(u)".into());
    }
    if ducci_apply(u, 6) != *u {
        return Some("D^6(u) != u".into());
    }
    let info = match find_cycle(u, 1000) {
        Ok(i) => i,
        Err(e) => return Some(e.to_string()),
    };
    if info.len != 0 {
        return Some(format!("not on a cycle (len = {})", info.len));
    }
    let all_equal = xs[0] == xs[1] && xs[1] == xs[2];
    if all_equal && !u.is_zero() {
        return (6 % info.per != 0).then(|| format!("period {} does not divide 6", info.per));
    }
    let half_set = m.is_multiple_of(2) && xs.iter().all(|&x| x == 0 || x == m / 2);
    let expect = if u.is_zero() {
        1
    } else if half_set {
        3
    } else {
        6
    };
    if info.per != expect {
        return Some(format!("period {} but expected {expect}", info.per));
    }
    match sum_triple_period(u) {
        Ok(p) if p == info.per => None,
        other => Some(format!("sum_triple_period gave {other:?}, iteration gave {}", info.per)),
    }
}

/// `uniform_period` against iteration for every `(x, ..., x)`.
pub fn check_uniform(ms: RangeInclusive<u64>, ns: RangeInclusive<usize>) -> CheckResult {
    let range = format!("m in {}, n in {}..={}", range_text(&ms), ns.start(), ns.end());
    timed("uniform", range, None, || {
        let mut cases = 0;
        for m in ms.clone().filter(|&m| m >= 2) {
            for n in ns.clone().filter(|&n| n >= 2) {
                let p = params(n, m);
                for x in 1..m {
                    cases += 1;
                    let u = p.uniform(x);
                    let info = match find_cycle(&u, DEFAULT_STEP_BUDGET) {
                        Ok(i) => i,
                        Err(e) => return Outcome { cases, sampled: false, witness: Some(format!("{u}: {e}")) },
                    };
                    let ok = match uniform_period(x, p) {
                        Ok(UniformPeriod::Vanishes) => ducci_apply(&u, info.len).is_zero(),
                        Ok(UniformPeriod::Period(d)) => d == info.per,
                        Err(_) => false,
                    };
                    if !ok {
                        let w = format!("n={n} m={m} x={x}: predicted {:?}, iteration gave per={}", uniform_period(x, p), info.per);
                        return Outcome { cases, sampled: false, witness: Some(w) };
                    }
                }
            }
        }
        Outcome::pass(cases)
    })
}

/// For `m1 | m`, scaling by `m / m1` embeds `Z_{m1}^n` into `Z_m^n` with
/// periods preserved, so the period set of the smaller space is contained
/// in that of the larger.
pub fn check_embedding(pairs: &[(u64, u64)], n: usize, opts: &VerifyOptions) -> CheckResult {
    let range = format!("n={n}, (m1,m) in {pairs:?}");
    timed("embedding", range, None, || {
        let mut cases = 0;
        for &(m1, m) in pairs {
            let fail = |cases, w: String| Outcome { cases, sampled: false, witness: Some(format!("m1={m1} m={m}: {w}")) };
            if m % m1 != 0 {
                return fail(cases, "m1 does not divide m".into());
            }
            let (small, big) = (params(n, m1), params(n, m));
            let factor = m / m1;
            let mut small_periods = BTreeSet::new();
            for i in 0..small.state_count().unwrap_or(0) {
                cases += 1;
                let u = Tuple::from_state_index(small, i).expect("in range");
                let v = tuple(big, u.entries().iter().map(|x| x * factor).collect());
                let (pu, pv) = match (find_cycle(&u, DEFAULT_STEP_BUDGET), find_cycle(&v, DEFAULT_STEP_BUDGET)) {
                    (Ok(a), Ok(b)) => (a.per, b.per),
                    (Err(e), _) | (_, Err(e)) => return fail(cases, e.to_string()),
                };
                if pu != pv {
                    return fail(cases, format!("Per{u} = {pu} but Per{v} = {pv}"));
                }
                small_periods.insert(pu);
            }
            let big_periods = match opts.record(big).and_then(|r| enumerate(big, r, opts.state_budget, opts.threads)) {
                Ok(e) => e.report().periods(),
                Err(e) => return fail(cases, e.to_string()),
            };
            if let Some(d) = small_periods.iter().find(|d| !big_periods.contains(d)) {
                return fail(cases, format!("period {d} occurs mod {m1} but not mod {m}"));
            }
        }
        Outcome::pass(cases)
    })
}

/// `6 | P_m(3)`.
pub fn check_six_divides(ms: RangeInclusive<u64>, opts: &VerifyOptions) -> CheckResult {
    timed("six-divides", format!("n=3, m in {}", range_text(&ms)), None, || {
        let mut cases = 0;
        for m in ms.clone().filter(|&m| m >= 3) {
            cases += 1;
            match opts.record(params(3, m)) {
                Ok(r) if r.period % 6 == 0 => {}
                Ok(r) => return Outcome { cases, sampled: false, witness: Some(format!("m={m}: P={}", r.period)) },
                Err(e) => return Outcome { cases, sampled: false, witness: Some(format!("m={m}: {e}")) },
            }
        }
        Outcome::pass(cases)
    })
}

/// For odd prime `m`, a triple that is neither uniform nor sum-zero has
/// period `P_m(3)`.
pub fn check_prime_n3(primes: &[u64], opts: &VerifyOptions) -> CheckResult {
    timed("prime-n3", format!("n=3, m in {primes:?}"), None, || {
        let mut cases = 0;
        for &m in primes {
            let p = params(3, m);
            let fail = |cases, w: String| Outcome { cases, sampled: false, witness: Some(format!("m={m}: {w}")) };
            let e = match opts.record(p).and_then(|r| enumerate(p, r, opts.state_budget, opts.threads)) {
                Ok(e) => e,
                Err(e) => return fail(cases, e.to_string()),
            };
            let r = e.report();
            cases += r.state_count();
            for (&d, c) in &r.class_breakdown {
                if d != r.period && c.other > 0 {
                    let u = e.class_filter(d).find(|(_, c)| c.tag() == ClassTag::Other).map(|(u, _)| u);
                    return fail(cases, format!("{} has period {d} < P = {}", u.map(|u| u.to_string()).unwrap_or_default(), r.period));
                }
            }
        }
        Outcome::pass(cases)
    })
}

/// Expected spectrum of `Z_p^p`: zero, the uniform tuples at `δ`, and
/// everything else at `pδ`.
pub fn p_p_expected(p: u64) -> BTreeMap<u64, u128> {
    let delta = multiplicative_order(2, p).expect("odd prime");
    BTreeMap::from([(1, 1), (delta, p as u128 - 1), (p * delta, (p as u128).pow(p as u32) - p as u128)])
}

/// Three period lengths in `Z_p^p`. The fixed-space count always runs;
/// enumeration runs when `p^p` fits the state budget.
pub fn check_p_p(primes: &[u64], opts: &VerifyOptions) -> CheckResult {
    let range = format!("p in {primes:?}, enumeration up to {} states", opts.state_budget);
    timed("p-p", range, None, || {
        let mut cases = 0;
        for &pr in primes {
            let p = params(pr as usize, pr);
            let fail = |cases, w: String| Outcome { cases, sampled: false, witness: Some(format!("p={pr}: {w}")) };
            let expect = p_p_expected(pr);
            let delta = expect.keys().nth(1).copied().expect("three keys");
            let rec = match opts.record(p) {
                Ok(r) => r,
                Err(e) => return fail(cases, e.to_string()),
            };
            if rec.period != pr * delta || rec.len != 0 {
                return fail(cases, format!("P={} L={}, expected P={} L=0", rec.period, rec.len, pr * delta));
            }
            let alg = match algebraic_spectrum(p, rec.period) {
                Ok(a) => a,
                Err(e) => return fail(cases, e.to_string()),
            };
            if alg.counts() != expect {
                return fail(cases, format!("fixed spaces give {:?}, expected {expect:?}", alg.counts()));
            }
            cases += 1;
            if p.state_count().is_some_and(|c| c <= opts.state_budget) {
                let e = match enumerate(p, rec, opts.state_budget, opts.threads) {
                    Ok(e) => e,
                    Err(e) => return fail(cases, e.to_string()),
                };
                let full: BTreeMap<u64, u128> = e.report().full_histogram.iter().map(|(&k, &v)| (k, v as u128)).collect();
                if full != expect {
                    let w = e.first_cycle_tuple(*full.keys().find(|k| !expect.contains_key(k)).unwrap_or(&1));
                    return fail(cases, format!("enumeration gives {full:?}; e.g. {}", w.map(|u| u.to_string()).unwrap_or_default()));
                }
                cases += e.report().state_count();
            }
        }
        Outcome::pass(cases)
    })
}

/// `det` of the `j x j` sign pattern is `+1` for even `j`, `-1` for odd `j`.
pub fn check_det_pattern(js: RangeInclusive<usize>) -> CheckResult {
    timed("det-pattern", format!("j in {}..={}", js.start(), js.end()), None, || {
        let mut cases = 0;
        for j in js.clone() {
            cases += 1;
            let det = int_determinant(&pattern_matrix(j));
            let expect = if j % 2 == 0 { 1 } else { -1 };
            if det != expect {
                return Outcome { cases, sampled: false, witness: Some(format!("j={j}: det={det}")) };
            }
        }
        Outcome::pass(cases)
    })
}

/// A row of the reference period tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub table: u8,
    pub n: usize,
    pub m: u64,
    pub period: u64,
    /// Period of `(1, ..., 1)`.
    pub uniform: u64,
    /// Table 2: the period of the sum-zero tuples. Table 3: the exceptional
    /// periods. Empty for table 1.
    pub extra: &'static [u64],
}

const fn row(table: u8, n: usize, m: u64, period: u64, uniform: u64, extra: &'static [u64]) -> TableRow {
    TableRow { table, n, m, period, uniform, extra }
}

pub const TABLES: &[TableRow] = &[
    row(1, 5, 3, 40, 2, &[]),
    row(1, 5, 5, 20, 4, &[]),
    row(1, 7, 7, 21, 3, &[]),
    row(1, 11, 3, 242, 2, &[]),
    row(1, 11, 11, 110, 10, &[]),
    row(1, 13, 3, 26, 2, &[]),
    row(1, 13, 13, 156, 12, &[]),
    row(1, 13, 17, 63856, 8, &[]),
    row(1, 13, 29, 24388, 28, &[]),
    row(1, 17, 3, 27880, 2, &[]),
    row(1, 17, 17, 136, 8, &[]),
    row(1, 19, 3, 373958, 2, &[]),
    row(1, 19, 19, 342, 18, &[]),
    row(2, 5, 7, 240, 3, &[80]),
    row(2, 5, 13, 420, 12, &[140]),
    row(2, 5, 17, 360, 8, &[180]),
    row(2, 5, 23, 2640, 11, &[240]),
    row(2, 5, 29, 140, 28, &[70]),
    row(2, 7, 3, 182, 2, &[91]),
    row(2, 7, 5, 868, 4, &[217]),
    row(2, 7, 17, 17192, 8, &[2149]),
    row(2, 7, 19, 16002, 18, &[889]),
    row(2, 7, 23, 6083, 11, &[553]),
    row(2, 11, 5, 3124, 4, &[1562]),
    row(2, 11, 7, 184866, 3, &[16806]),
    row(2, 11, 13, 4084212, 12, &[680702]),
    row(2, 11, 17, 7809208, 8, &[1952302]),
    row(2, 11, 19, 27237078, 18, &[3026342]),
    row(2, 13, 7, 509808, 3, &[169936]),
    row(2, 13, 11, 7676760, 10, &[1535352]),
    row(3, 5, 11, 10, 10, &[2, 5]),
    row(3, 5, 19, 90, 18, &[45]),
    row(3, 5, 31, 30, 5, &[3, 15]),
    row(3, 7, 13, 84, 12, &[28]),
    row(3, 11, 23, 22, 11, &[11]),
    row(3, 13, 5, 312, 4, &[156]),
    row(3, 13, 23, 158158, 11, &[11297]),
    row(3, 23, 3, 177146, 2, &[88573]),
];

/// Periods below `P` reached by some cycle tuple that is neither zero nor
/// uniform.
pub fn exception_periods(alg: &SpectrumAlgebraic, delta: u64) -> BTreeSet<u64> {
    let m = alg.params.m() as u128;
    alg.divisors
        .iter()
        .filter(|e| e.d < alg.period)
        .filter(|e| {
            let mut rest = e.exact_count;
            if e.d == 1 {
                rest -= 1;
            }
            if e.d == delta {
                rest = rest.saturating_sub(m - 1);
            }
            rest > 0
        })
        .map(|e| e.d)
        .collect()
}

/// A row whose periods below `P` differ from the listed column, with the
/// values found by direct iteration of fixed-space vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableCorrection {
    pub table: u8,
    pub n: usize,
    pub m: u64,
    /// Periods below `P` besides zero and uniform.
    pub below: &'static [u64],
    /// Those among them held by tuples whose entries do not sum to zero.
    pub not_sum_zero: &'static [u64],
}

const fn fix(table: u8, n: usize, m: u64, below: &'static [u64], not_sum_zero: &'static [u64]) -> TableCorrection {
    TableCorrection { table, n, m, below, not_sum_zero }
}

pub const TABLE_CORRECTIONS: &[TableCorrection] = &[
    fix(1, 13, 3, &[13], &[]),
    fix(2, 5, 29, &[35, 70], &[]),
    fix(2, 11, 5, &[142, 284, 1562], &[284]),
    fix(2, 11, 7, &[61622], &[]),
    fix(3, 7, 13, &[28, 42], &[]),
];

impl TableRow {
    /// Periods below `P` held by tuples that are neither zero nor uniform,
    /// as listed.
    pub fn listed_below(&self) -> BTreeSet<u64> {
        self.extra.iter().copied().collect()
    }

    pub fn correction(&self) -> Option<&'static TableCorrection> {
        TABLE_CORRECTIONS.iter().find(|c| (c.table, c.n, c.m) == (self.table, self.n, self.m))
    }

    /// The listed set, or its correction when there is one.
    pub fn expected_below(&self) -> BTreeSet<u64> {
        match self.correction() {
            Some(c) => c.below.iter().copied().collect(),
            None => self.listed_below(),
        }
    }

    pub fn is_corrected(&self) -> bool {
        self.correction().is_some()
    }
}

fn table_row_violation(row: &TableRow, opts: &VerifyOptions) -> Result<(), String> {
    let p = params(row.n, row.m);
    let rec = opts.record(p).map_err(|e| e.to_string())?;
    if rec.period != row.period {
        return Err(format!("P={} (table {})", rec.period, row.period));
    }
    match uniform_period(1, p) {
        Ok(UniformPeriod::Period(d)) if d == row.uniform => {}
        other => return Err(format!("uniform period {other:?} (table {})", row.uniform)),
    }
    if is_prime(row.m) && p.state_count().is_some_and(|c| c <= opts.state_budget) {
        let alg = algebraic_spectrum(p, rec.period).map_err(|e| e.to_string())?;
        let e = enumerate(p, rec, opts.state_budget, opts.threads).map_err(|e| e.to_string())?;
        compare_spectra(&e, &alg).map_err(|e| match e {
            Error::Mismatch { what, witness } => format!("{what}; witness {witness:?}"),
            e => e.to_string(),
        })?;
    }
    Ok(())
}

fn table_periods_violation(row: &TableRow, opts: &VerifyOptions) -> Result<(), String> {
    let p = params(row.n, row.m);
    let rec = opts.record(p).map_err(|e| e.to_string())?;
    let alg = algebraic_spectrum(p, rec.period).map_err(|e| e.to_string())?;
    let found = exception_periods(&alg, row.uniform);
    let expect = row.expected_below();
    if found != expect {
        return Err(format!("periods below P besides zero and uniform: {found:?} (expected {expect:?})"));
    }
    if row.table == 2 {
        // the sum-zero hyperplane is exactly the fixed space at the largest
        // smaller period
        let s = *expect.last().expect("table 2 rows have a sum period");
        let space = nullspace(&build_system(s, p)).map_err(|e| e.to_string())?;
        let in_hyperplane = space.basis.iter().all(|b| b.entry_sum() == 0);
        if space.dimension != row.n - 1 || !in_hyperplane {
            return Err(format!("fixed space at {s} has dimension {} and is not the sum hyperplane", space.dimension));
        }
        let outside: BTreeSet<u64> =
            alg.divisors.iter().filter(|e| e.d < rec.period && e.exact_classes.other > 0).map(|e| e.d).collect();
        let allowed: BTreeSet<u64> = row.correction().map(|c| c.not_sum_zero.iter().copied().collect()).unwrap_or_default();
        if outside != allowed {
            return Err(format!("periods below P reached outside the sum hyperplane: {outside:?} (expected {allowed:?})"));
        }
    }
    Ok(())
}

fn table_check(
    name: &str,
    rows: &[TableRow],
    opts: &VerifyOptions,
    violation: fn(&TableRow, &VerifyOptions) -> Result<(), String>,
) -> CheckResult {
    let range = format!("{} rows with m <= {}", rows.len(), rows.iter().map(|r| r.m).max().unwrap_or(0));
    timed(name, range, None, || {
        let mut cases = 0;
        for r in rows {
            cases += 1;
            if let Err(why) = violation(r, opts) {
                let w = format!("table {} row n={} m={}: {why}", r.table, r.n, r.m);
                return Outcome { cases, sampled: false, witness: Some(w) };
            }
        }
        Outcome::pass(cases)
    })
}

/// Maximal and uniform periods of each row, plus enumeration against the
/// fixed-space count for rows within the state budget.
pub fn check_tables(rows: &[TableRow], opts: &VerifyOptions) -> CheckResult {
    table_check("tables", rows, opts, table_row_violation)
}

/// Which periods below the maximum occur in each row (prime `m` only).
pub fn check_table_periods(rows: &[TableRow], opts: &VerifyOptions) -> CheckResult {
    let rows: Vec<TableRow> = rows.iter().copied().filter(|r| is_prime(r.m)).collect();
    let mut r = table_check("table-periods", &rows, opts, table_periods_violation);
    let corrected = rows.iter().filter(|r| r.is_corrected()).count();
    r.range = format!("{}, {corrected} corrected", r.range);
    r
}

fn random_params(rng: &mut ChaCha8Rng, ns: RangeInclusive<usize>, ms: RangeInclusive<u64>) -> Params {
    params(rng.gen_range(ns), rng.gen_range(ms))
}

fn property(
    name: &str,
    range: String,
    cases: usize,
    seed: u64,
    mut case: impl FnMut(&mut ChaCha8Rng) -> Option<((usize, u64, Vec<u64>), String)>,
) -> CheckResult {
    timed(name, range, Some(seed), || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = None;
        for _ in 0..cases {
            if let Some((key, msg)) = case(&mut rng) {
                keep_min(&mut worst, key, msg);
            }
        }
        Outcome { cases: cases as u64, sampled: true, witness: worst.map(|(_, w)| w) }
    })
}

/// `D(u + v) = D(u) + D(v)` and `D(cu) = cD(u)`.
pub fn check_linearity(cases: usize, seed: u64, max_m: u64) -> CheckResult {
    property("linearity", format!("n in 2..=12, m in 2..={max_m}"), cases, seed, |rng| {
        let p = random_params(rng, 2..=12, 2..=max_m);
        let (u, v) = (random_tuple(rng, p), random_tuple(rng, p));
        let c = rng.gen_range(0..p.m());
        let ok = ducci_step(&u.add(&v)) == ducci_step(&u).add(&ducci_step(&v))
            && ducci_step(&u.scale(c)) == ducci_step(&u).scale(c);
        (!ok).then(|| ((p.n(), p.m(), u.entries().to_vec()), format!("{p} u={u} v={v} c={c}")))
    })
}

/// `D(H(u)) = H(D(u))`.
pub fn check_commutation(cases: usize, seed: u64, max_m: u64) -> CheckResult {
    property("commutation", format!("n in 2..=12, m in 2..={max_m}"), cases, seed, |rng| {
        let p = random_params(rng, 2..=12, 2..=max_m);
        let u = random_tuple(rng, p);
        let ok = ducci_step(&rotate(&u)) == rotate(&ducci_step(&u));
        (!ok).then(|| ((p.n(), p.m(), u.entries().to_vec()), format!("{p} u={u}")))
    })
}

const BIG_PRIME: u64 = (1 << 61) - 1;

/// Exact `(a_r, b_r, c_r)` for `n = 3` by the Pascal recurrence.
fn triple_rows(r_max: usize) -> Vec<[u128; 3]> {
    let mut rows = vec![[1u128, 0, 0]];
    for r in 1..=r_max {
        let [a, b, c] = rows[r - 1];
        rows.push([a + c, b + a, c + b]);
    }
    rows
}

/// Coefficient-row identities: the Pascal recurrence, binomial values for
/// `r < n`, row composition, the basic-sequence readout, the `n = 3`
/// composition formulas and the `±1` offsets between `a_r, b_r, c_r`.
pub fn check_coefficients(cases: usize, seed: u64, max_m: u64) -> CheckResult {
    let exact = triple_rows(60);
    let mut offset_failure = None;
    for (r, &[a, b, c]) in exact.iter().enumerate() {
        let ok = match r % 6 {
            0 => a == b + 1 && b == c,
            1 => c + 1 == a && a == b,
            2 => b == a + 1 && a == c,
            3 => a + 1 == b && b == c,
            4 => c == a + 1 && a == b,
            _ => b + 1 == a && a == c,
        };
        let row = coeff_row(r as u64, params(3, BIG_PRIME));
        if !ok || row.iter().zip([a, b, c]).any(|(&x, y)| x as u128 != y) {
            offset_failure = Some(format!("r={r}: (a,b,c)=({a},{b},{c}), ring row {row:?}"));
            break;
        }
    }
    let mut result = property(
        "coefficients",
        format!("random n in 2..=10, m in 2..={max_m}, r < 1000; n=3 offsets for r <= 60"),
        cases,
        seed,
        |rng| {
            let p = random_params(rng, 2..=10, 2..=max_m);
            let (n, m) = (p.n(), p.m());
            let r = rng.gen_range(0..1000u64);
            let t = rng.gen_range(1..1000u64);
            let key = (n, m, vec![r, t]);
            let row = coeff_row(r, p);
            let next = coeff_row(r + 1, p);
            for s in 0..n {
                if next[s] != (row[s] + row[(s + n - 1) % n]) % m {
                    return Some((key, format!("{p}: Pascal recurrence fails at r={r} s={}", s + 1)));
                }
            }
            if (r as usize) < n {
                let mut binom = 1u128;
                for s in 0..n {
                    let expect = if s as u64 <= r { (binom % m as u128) as u64 } else { 0 };
                    if row[s] != expect {
                        return Some((key, format!("{p}: a_{{{r},{}}} != C({r},{s})", s + 1)));
                    }
                    binom = if (s as u64) < r { binom * (r - s as u64) as u128 / (s as u128 + 1) } else { 0 };
                }
            }
            let row_t = coeff_row(t, p);
            let sum_row = coeff_row(r + t, p);
            for s in 0..n {
                let conv = (0..n).fold(0u128, |acc, i| {
                    (acc + row_t[i] as u128 * row[(s + n - i) % n] as u128) % m as u128
                });
                if conv as u64 != sum_row[s] {
                    return Some((key, format!("{p}: composition fails for r={r} t={t} s={}", s + 1)));
                }
            }
            let basic = ducci_apply(&p.basic(), r);
            let reversed: Vec<u64> = row.iter().rev().copied().collect();
            if basic.entries() != reversed.as_slice() {
                return Some((key, format!("{p}: D^{r}(0,...,0,1) = {basic}, row {row:?}")));
            }
            // n = 3 formulas over a large prime
            let big = params(3, BIG_PRIME);
            let (lo, hi) = (t.min(r + 1), t.max(r + 1) + 1);
            let (x, y) = (coeff_row(lo, big), coeff_row(hi, big));
            let z = coeff_row(lo + hi, big);
            let mul = |a: u64, b: u64| ((a as u128 * b as u128) % BIG_PRIME as u128) as u64;
            let add3 = |a: u64, b: u64, c: u64| ((a as u128 + b as u128 + c as u128) % BIG_PRIME as u128) as u64;
            let (at, bt, ct, ar, br, cr) = (x[0], x[1], x[2], y[0], y[1], y[2]);
            let want = [
                add3(mul(at, ar), mul(bt, cr), mul(ct, br)),
                add3(mul(at, br), mul(bt, ar), mul(ct, cr)),
                add3(mul(at, cr), mul(bt, br), mul(ct, ar)),
            ];
            if z != want {
                return Some(((3, BIG_PRIME, vec![hi, lo]), format!("n=3 composition fails for r={hi} t={lo}")));
            }
            None
        },
    );
    if let Some(w) = offset_failure {
        result.passed = false;
        result.witness = Some(w);
    }
    result.cases += exact.len() as u64;
    result
}

/// `Per(u) | P_m(n)` and `Len(u) <= L_m(n)` for random tuples.
pub fn check_period_bounds(cases: usize, seed: u64, max_m: u64, opts: &VerifyOptions) -> CheckResult {
    let mut records: HashMap<(usize, u64), MaxPeriodRecord> = HashMap::new();
    property("period-bounds", format!("n in 2..=8, m in 2..={max_m}"), cases, seed, |rng| {
        let p = random_params(rng, 2..=8, 2..=max_m);
        let u = random_tuple(rng, p);
        let key = (p.n(), p.m(), u.entries().to_vec());
        let rec = match records.get(&(p.n(), p.m())) {
            Some(r) => *r,
            None => match opts.record(p) {
                Ok(r) => *records.entry((p.n(), p.m())).or_insert(r),
                Err(_) => return None,
            },
        };
        match find_cycle(&u, DEFAULT_STEP_BUDGET) {
            Ok(i) if rec.period % i.per == 0 && i.len <= rec.len => None,
            Ok(i) => Some((key, format!("{p} u={u}: len={} per={}, L={} P={}", i.len, i.per, rec.len, rec.period))),
            Err(e) => Some((key, format!("{p} u={u}: {e}"))),
        }
    })
}

/// Suite names accepted by [`run_suite`].
pub const SUITES: &[&str] = &[
    "sum-triples",
    "uniform",
    "embedding",
    "six-divides",
    "prime-n3",
    "p-p",
    "det-pattern",
    "tables",
    "table-periods",
    "linearity",
    "commutation",
    "coefficients",
    "period-bounds",
];

/// Runs one suite, or every suite for `"all"`. Returns `None` for an
/// unknown name.
pub fn run_suite(name: &str, opts: &VerifyOptions) -> Option<Vec<CheckResult>> {
    if name == "all" {
        return Some(SUITES.iter().flat_map(|s| run_suite(s, opts).expect("known suite")).collect());
    }
    let prop_m = opts.max_m.unwrap_or(1000);
    let result = match name {
        "sum-triples" => check_sum_triples(opts.m_range(2, 30), DEFAULT_SAMPLES, opts.seed),
        "uniform" => check_uniform(opts.m_range(2, 60), 2..=9),
        "embedding" => check_embedding(&[(2, 4), (3, 9), (2, 6), (3, 6)], 3, opts),
        "six-divides" => check_six_divides(opts.m_range(3, 60), opts),
        "prime-n3" => {
            let primes: Vec<u64> = opts.m_range(3, 13).filter(|&m| is_prime(m)).collect();
            check_prime_n3(&primes, opts)
        }
        "p-p" => {
            let primes: Vec<u64> = [3, 5, 7, 11].into_iter().filter(|&p| opts.max_m.is_none_or(|k| p <= k)).collect();
            check_p_p(&primes, opts)
        }
        "det-pattern" => check_det_pattern(2..=12),
        "tables" => {
            let rows: Vec<TableRow> =
                TABLES.iter().copied().filter(|r| opts.max_m.is_none_or(|k| r.m <= k)).collect();
            check_tables(&rows, opts)
        }
        "table-periods" => {
            let rows: Vec<TableRow> =
                TABLES.iter().copied().filter(|r| opts.max_m.is_none_or(|k| r.m <= k)).collect();
            check_table_periods(&rows, opts)
        }
        "linearity" => check_linearity(DEFAULT_CASES, opts.seed, prop_m),
        "commutation" => check_commutation(DEFAULT_CASES, opts.seed, prop_m),
        "coefficients" => check_coefficients(DEFAULT_CASES, opts.seed, prop_m),
        "period-bounds" => check_period_bounds(DEFAULT_CASES, opts.seed, opts.max_m.unwrap_or(30), opts),
        _ => return None,
    };
    Some(vec![result])
}

#[cfg(test)]
mod tests {
    use super::*;
    use ducci_core::classify;

    #[test]
    fn exact_rows_match_the_ring() {
        let rows = triple_rows(5);
        assert_eq!(rows, vec![[1, 0, 0], [1, 1, 0], [1, 2, 1], [2, 3, 3], [5, 5, 6], [11, 10, 11]]);
    }

    #[test]
    fn sum_triple_violation_catches_a_bad_tuple() {
        // (1,2,3) in Z_7 does not sum to zero, so D^2 != H
        let u = tuple(params(3, 7), vec![1, 2, 3]);
        assert!(sum_triple_violation(&u).is_some());
        assert!(sum_triple_violation(&tuple(params(3, 4), vec![0, 2, 2])).is_none());
        assert!(sum_triple_violation(&tuple(params(3, 5), vec![1, 1, 3])).is_none());
    }

    #[test]
    fn keep_min_keeps_the_smallest() {
        let mut slot = None;
        keep_min(&mut slot, (5, 3), "b".into());
        keep_min(&mut slot, (4, 9), "a".into());
        keep_min(&mut slot, (6, 0), "c".into());
        assert_eq!(slot, Some(((4, 9), "a".to_string())));
    }

    #[test]
    fn bad_table_row_is_reported() {
        let rows = [row(2, 5, 7, 240, 3, &[81])];
        assert!(check_tables(&rows, &VerifyOptions::default()).passed);
        let r = check_table_periods(&rows, &VerifyOptions::default());
        assert!(!r.passed);
        assert!(r.witness.unwrap().contains("n=5 m=7"));
        let rows = [row(1, 5, 7, 241, 3, &[])];
        assert!(!check_tables(&rows, &VerifyOptions::default()).passed);
    }

    #[test]
    fn exception_sets_for_small_rows() {
        let p = params(5, 11);
        let alg = algebraic_spectrum(p, 10).unwrap();
        assert_eq!(exception_periods(&alg, 10), BTreeSet::from([2, 5]));
        let alg = algebraic_spectrum(params(5, 7), 240).unwrap();
        assert_eq!(exception_periods(&alg, 3), BTreeSet::from([80]));
    }

    #[test]
    fn corrected_rows_have_witnesses() {
        let witnesses: [(usize, u64, &[u64], u64); 6] = [
            (13, 3, &[2, 1, 1, 0, 0, 2, 2, 1, 0, 0, 0, 0, 0], 13),
            (5, 29, &[28, 24, 5, 1, 0], 35),
            (11, 5, &[1, 1, 2, 2, 0, 3, 1, 0, 0, 0, 0], 142),
            (11, 5, &[4, 3, 1, 4, 4, 1, 0, 0, 0, 0, 0], 284),
            (11, 7, &[6, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0], 61622),
            (7, 13, &[12, 6, 4, 9, 7, 1, 0], 42),
        ];
        for (n, m, xs, per) in witnesses {
            let u = tuple(params(n, m), xs.to_vec());
            assert_eq!(find_cycle(&u, DEFAULT_STEP_BUDGET).unwrap().per, per, "{u}");
            let row = TABLES.iter().find(|r| (r.n, r.m) == (n, m)).unwrap();
            assert!(row.is_corrected());
            assert!(row.expected_below().contains(&per));
            assert!(!row.listed_below().contains(&per));
            let summed = u.entry_sum() == 0;
            assert_eq!(row.correction().unwrap().not_sum_zero.contains(&per), !summed);
        }
        assert_eq!(TABLES.iter().filter(|r| r.is_corrected()).count(), TABLE_CORRECTIONS.len());
    }

    #[test]
    fn quick_suites_pass() {
        let opts = VerifyOptions::default();
        for name in ["det-pattern", "six-divides", "linearity", "commutation"] {
            for r in run_suite(name, &opts).unwrap() {
                assert!(r.passed, "{r}");
            }
        }
        assert!(run_suite("nope", &opts).is_none());
    }

    #[test]
    fn classification_tags_line_up() {
        let u = tuple(params(3, 4), vec![2, 2, 2]);
        assert_eq!(classify(&u).tag(), ClassTag::Uniform);
    }
}
