//! File formats, a thread pool, convergent sweeps, a self-test runner and the
//! command-line front end for `aperispec-core`.

pub mod cli;
pub mod error;
pub mod exec;
pub mod format;
pub mod selftest;
pub mod sweep;

pub use error::CliError;
pub use exec::Parallel;
