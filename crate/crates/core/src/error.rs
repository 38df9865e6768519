use alloc::string::String;
use core::fmt;

use crate::ring::Tuple;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// `n < 2`, `m < 2`, a residue out of range, or a length mismatch.
    InvalidParams(String),
    /// A computation would need more steps or states than it was allowed.
    BudgetExceeded { what: &'static str, budget: u64 },
    /// `D^multiple(u) != u` for the tuple handed to `exact_period_of_fixed`.
    NotFixed { multiple: u64 },
    /// The operation needs a prime modulus.
    CompositeModulus(u64),
    /// The operation does not apply to this input.
    NotApplicable(&'static str),
    /// No tuple has the requested period.
    EmptyClass { period: u64 },
    /// Two independent computations disagree.
    Mismatch { what: String, witness: Option<Tuple> },
    /// A structural fact that must always hold was violated.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::BudgetExceeded { what, budget } => {
                write!(f, "{what} exceeds the budget of {budget}")
            }
            Error::NotFixed { multiple } => {
                write!(f, "tuple is not fixed by D^{multiple}")
            }
            Error::CompositeModulus(m) => write!(f, "modulus {m} is not prime"),
            Error::NotApplicable(why) => write!(f, "not applicable: {why}"),
            Error::EmptyClass { period } => write!(f, "no tuple has period {period}"),
            Error::Mismatch { what, witness } => match witness {
                Some(w) => write!(f, "mismatch: {what} (witness {w})"),
                None => write!(f, "mismatch: {what}"),
            },
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
