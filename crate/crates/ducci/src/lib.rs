//! File formats, threading and the command line around `ducci-core`.

pub mod cache;
pub mod cli;
pub mod output;
pub mod parallel;
pub mod verify;

pub use ducci_core as core;
