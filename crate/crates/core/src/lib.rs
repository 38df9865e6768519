//! Periods of Ducci sequences on `Z_m^n`.
//!
//! The Ducci map sends `(x_1, ..., x_n)` to `(x_1 + x_2, ..., x_n + x_1) mod m`.
//! This crate computes pre-periods and periods of single tuples, the maximal
//! period of the basic sequence `(0, ..., 0, 1)`, the full period spectrum of
//! `Z_m^n` (by exhaustive orbit walking and, for prime `m`, by counting the
//! solution spaces of `D^d(u) = u` and inverting over the divisor lattice),
//! and the permutation symmetry of each period class.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the results
//! cache, threading and the command line live in the `ducci` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod classify;
pub mod cycle;
mod error;
pub mod fixed_space;
pub mod graph;
pub mod linalg;
pub mod ring;
pub mod spectrum;
pub mod symmetry;

pub use classify::{classify, sum_triple_period, uniform_period, ClassCounts, ClassTag, TupleClass, UniformPeriod};
pub use cycle::{exact_period_of_fixed, find_cycle, max_period, CycleInfo, MaxPeriodRecord, DEFAULT_STEP_BUDGET};
pub use error::Error;
pub use fixed_space::{algebraic_spectrum, build_system, nullspace, CirculantSystem, FixedSpace, SpectrumAlgebraic};
pub use graph::{component_of, predecessors, TransitionGraph};
pub use ring::{coeff_row, ducci_apply, ducci_step, ring_mul, ring_pow, rotate, Params, RingElement, Tuple};
pub use spectrum::{brute_spectrum, spectrum_compare, Enumeration, SpectrumReport};
pub use symmetry::{identify_small_group, stabilizer, GroupReport, Perm};

pub type Result<T, E = Error> = core::result::Result<T, E>;
