//! The `ducci` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ducci_core::fixed_space::algebraic_spectrum;
use ducci_core::graph::DEFAULT_NODE_BUDGET;
use ducci_core::spectrum::{compare_spectra, DEFAULT_STATE_BUDGET};
use ducci_core::{component_of, find_cycle, Error, Params, SpectrumReport, Tuple, DEFAULT_STEP_BUDGET};
use serde_json::{json, Value};

use crate::cache::{cached_max_period, Cache, DEFAULT_CACHE_PATH};
use crate::output::{algebraic_csv, algebraic_json, export_dot, group_json, record_json, report_csv, report_json};
use crate::parallel::{default_threads, enumerate, stabilizer};
use crate::verify::{run_suite, VerifyOptions, DEFAULT_ENUM_BUDGET, DEFAULT_SEED, SUITES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ducci", version, about = "Periods of Ducci sequences on Z_m^n")]
pub struct Cli {
    /// Results cache (JSON lines)
    #[arg(long, global = true, value_name = "PATH", default_value = DEFAULT_CACHE_PATH)]
    pub cache: PathBuf,
    /// Do not read or write the cache
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Worker threads [default: all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for sampled checks
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Space {
    /// Tuple length
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    /// Modulus
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub m: u64,
}

impl Space {
    fn params(&self) -> Result<Params, Error> {
        let n = usize::try_from(self.n).map_err(|_| Error::InvalidParams("n too large".into()))?;
        Params::new(n, self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    Algebraic,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pre-period and period of one tuple
    Period {
        #[command(flatten)]
        space: Space,
        /// Comma-separated entries, e.g. 0,0,2
        #[arg(long)]
        tuple: String,
        /// Step budget for cycle detection
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// P_m(n) and L_m(n) from the basic tuple (0,...,0,1)
    Maxperiod {
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Period histogram of the whole space
    Spectrum {
        #[command(flatten)]
        space: Space,
        #[arg(long, value_enum, default_value_t = Method::Brute)]
        method: Method,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
        /// Largest m^n to enumerate
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        state_budget: u64,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        budget: u64,
    },
    /// Fixed space of D^d(u) = u for every divisor d of P (prime m)
    Divisors {
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Permutations of entries that preserve the tuples of one period
    Symmetry {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        period: u64,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        state_budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Transition-graph component of a tuple
    Graph {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        tuple: String,
        /// Write DOT here instead of standard output
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: usize,
    },
    /// Run the checkers
    Verify {
        /// Suite name or "all"
        #[arg(long, default_value = "all")]
        suite: String,
        /// Upper end of the modulus ranges
        #[arg(long)]
        max_m: Option<u64>,
        /// Largest m^n enumerated exhaustively
        #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
        /// Write the JSON report here
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

/// Failure of a command, with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::Mismatch { .. } | Error::Internal(_) => EXIT_FAILED,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        // a closed stdout (e.g. `| head`) is not an error
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure { code: EXIT_OK, message: String::new() };
        }
        Failure { code: EXIT_FAILED, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

pub fn parse_tuple(params: Params, text: &str) -> Result<Tuple, Failure> {
    let entries = text
        .split(',')
        .map(|s| s.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("bad tuple {text:?}: {e}")))?;
    Ok(Tuple::new(params, entries)?)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn report_text(r: &SpectrumReport) -> String {
    let mut out = format!("n={} m={} P={} L={}\n", r.params.n(), r.params.m(), r.period, r.len);
    out.push_str("period count cycle zero uniform sum other\n");
    for (d, count) in &r.full_histogram {
        let c = &r.class_breakdown[d];
        let cycle = r.cycle_histogram.get(d).copied().unwrap_or(0);
        writeln!(out, "{d} {count} {cycle} {} {} {} {}", c.zero, c.uniform, c.sum, c.other).unwrap();
    }
    out
}

struct Context {
    cache: Option<Cache>,
    threads: usize,
    seed: u64,
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let ctx = Context {
        cache: (!cli.no_cache).then(|| Cache::new(cli.cache.clone())),
        threads: cli.threads.unwrap_or_else(default_threads).max(1),
        seed: cli.seed,
    };
    let record = |p: Params, budget: u64| cached_max_period(ctx.cache.as_ref(), p, budget);
    match cli.command {
        Command::Period { space, tuple, budget, json } => {
            let u = parse_tuple(space.params()?, &tuple)?;
            let info = find_cycle(&u, budget)?;
            if json {
                writeln!(out, "{}", json!({ "len": info.len, "per": info.per }))?;
            } else {
                writeln!(out, "len={} per={}", info.len, info.per)?;
            }
        }
        Command::Maxperiod { space, budget, json } => {
            let rec = record(space.params()?, budget)?;
            if json {
                writeln!(out, "{}", record_json(&rec))?;
            } else {
                writeln!(out, "P={} L={}", rec.period, rec.len)?;
            }
        }
        Command::Spectrum { space, method, json, csv, state_budget, budget } => {
            let p = space.params()?;
            let rec = record(p, budget)?;
            let brute = match method {
                Method::Algebraic => None,
                _ => Some(enumerate(p, rec, state_budget, ctx.threads)?),
            };
            let alg = match method {
                Method::Brute => None,
                _ => Some(algebraic_spectrum(p, rec.period)?),
            };
            if let (Some(b), Some(a)) = (&brute, &alg) {
                if let Err(e) = compare_spectra(b, a) {
                    let mut f = Failure::from(e);
                    f.message = format!("brute and algebraic spectra differ: {}", f.message);
                    return Err(f);
                }
            }
            match (brute.as_ref().map(|e| e.report()), alg.as_ref()) {
                (Some(r), _) if csv => write!(out, "{}", report_csv(r))?,
                (None, Some(a)) if csv => write!(out, "{}", algebraic_csv(a))?,
                (Some(r), Some(a)) if json => {
                    let v = json!({ "brute": report_json(r), "algebraic": algebraic_json(a), "match": true });
                    writeln!(out, "{}", pretty(&v))?
                }
                (Some(r), None) if json => writeln!(out, "{}", pretty(&report_json(r)))?,
                (None, Some(a)) if json => writeln!(out, "{}", pretty(&algebraic_json(a)))?,
                (Some(r), a) => {
                    write!(out, "{}", report_text(r))?;
                    if a.is_some() {
                        writeln!(out, "algebraic: match")?;
                    }
                }
                (None, Some(a)) => {
                    writeln!(out, "n={} m={} P={}", p.n(), p.m(), a.period)?;
                    writeln!(out, "period count zero uniform sum other")?;
                    for e in a.divisors.iter().filter(|e| e.exact_count > 0) {
                        let c = &e.exact_classes;
                        writeln!(out, "{} {} {} {} {} {}", e.d, e.exact_count, c.zero, c.uniform, c.sum, c.other)?;
                    }
                }
                (None, None) => unreachable!("some method runs"),
            }
        }
        Command::Divisors { space, budget, json } => {
            let p = space.params()?;
            let rec = record(p, budget)?;
            let a = algebraic_spectrum(p, rec.period)?;
            if json {
                writeln!(out, "{}", pretty(&algebraic_json(&a)))?;
            } else {
                writeln!(out, "n={} m={} P={} L={}", p.n(), p.m(), rec.period, rec.len)?;
                writeln!(out, "d dimension exact zero uniform sum other")?;
                for e in &a.divisors {
                    let c = &e.exact_classes;
                    writeln!(out, "{} {} {} {} {} {} {}", e.d, e.dimension, e.exact_count, c.zero, c.uniform, c.sum, c.other)?;
                }
            }
        }
        Command::Symmetry { space, period, state_budget, json } => {
            let p = space.params()?;
            let rec = record(p, DEFAULT_STEP_BUDGET)?;
            let g = stabilizer(p, period, rec, state_budget, ctx.threads)?;
            if json {
                writeln!(out, "{}", pretty(&group_json(&g)))?;
            } else {
                writeln!(
                    out,
                    "order={} abelian={} n_cycle={} name={}",
                    g.order, g.is_abelian, g.contains_n_cycle, g.name_hint
                )?;
                let orders: Vec<String> = g.element_order_histogram.iter().map(|(o, c)| format!("{o}:{c}")).collect();
                writeln!(out, "element_orders {}", orders.join(" "))?;
                let gens: Vec<String> = g.generators.iter().map(|p| p.to_string()).collect();
                writeln!(out, "generators {}", gens.join(" "))?;
            }
        }
        Command::Graph { space, tuple, dot, node_budget } => {
            let u = parse_tuple(space.params()?, &tuple)?;
            let g = component_of(&u, node_budget)?;
            let text = export_dot(&g);
            match dot {
                Some(path) => {
                    std::fs::write(&path, text)?;
                    writeln!(out, "nodes={} edges={} cycle={}", g.nodes.len(), g.edges.len(), g.cycle_len())?;
                }
                None => write!(out, "{text}")?,
            }
        }
        Command::Verify { suite, max_m, budget, json, out: report_path } => {
            let opts = VerifyOptions { max_m, state_budget: budget, seed: ctx.seed, threads: ctx.threads, cache: ctx.cache };
            let results = run_suite(&suite, &opts)
                .ok_or_else(|| usage(format!("unknown suite {suite:?}; expected one of all, {}", SUITES.join(", "))))?;
            let all_passed = results.iter().all(|r| r.passed);
            let report = Value::Array(results.iter().map(|r| r.to_json()).collect());
            if let Some(path) = report_path {
                std::fs::write(path, pretty(&report) + "\n")?;
            }
            if json {
                writeln!(out, "{}", pretty(&report))?;
            } else {
                for r in &results {
                    writeln!(out, "{r}")?;
                }
            }
            return Ok(if all_passed { EXIT_OK } else { EXIT_FAILED });
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` and runs the command, writing results to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                let _ = writeln!(err, "error: {}", f.message);
            }
            f.code
        }
    }
}
