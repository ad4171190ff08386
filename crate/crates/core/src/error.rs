use alloc::string::String;
use alloc::vec::Vec;

use crate::symbolic::Letter;

/// Errors raised by the core library.
///
/// Variants fall into two classes: domain errors (bad input, violated
/// preconditions) and numerical failures. [`Error::is_numerical`] tells them
/// apart so front ends can map them to distinct exit codes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported lattice dimension {0}; Bloch sweeps are implemented for d = 1 only")]
    UnsupportedDimension(usize),

    #[error("invalid alphabet metric: {invariant} violated at ({a}, {b})")]
    InvalidMetric {
        invariant: &'static str,
        a: usize,
        b: usize,
    },

    #[error("substitution is not primitive")]
    NotPrimitive,

    #[error("coefficient table has no entry for pattern {pattern:?} (hop {hop:?})")]
    UncoveredPattern { hop: Vec<i64>, pattern: Vec<Letter> },

    #[error("dictionary at shell {shell} not certified: window set did not stabilize within {limit} sites")]
    DictionaryNotCertified { shell: u32, limit: u64 },

    #[error("dictionary at shell {0} is not available for this subshift")]
    DictionaryUnavailable(u32),

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("eigensolver did not converge{}", theta.map(|t| alloc::format!(" at theta = {t}")).unwrap_or_default())]
    NoConvergence { theta: Option<f64> },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("linear-growth declaration violated: R_H|s = {radius} > C_H * s at s = {s}")]
    GrowthViolated { s: u32, radius: u32 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::NotHermitian { .. })
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
