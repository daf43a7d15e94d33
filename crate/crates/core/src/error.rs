use thiserror::Error;

use crate::algebra::OperatorAlgebra;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter count mismatch: circuit takes {expected}, got {found}")]
    ParamCount { expected: usize, found: usize },

    #[error("distribution is not normalized (sum = {0})")]
    Unnormalized(f64),

    #[error("missing correlator for subset mask {0:#b}")]
    MissingCorrelator(u64),

    #[error("Lie closure exceeded max_dim = {max_dim}")]
    ClosureTruncated {
        max_dim: usize,
        partial: Box<OperatorAlgebra>,
    },

    #[error("expansion of {terms} terms exceeds the cap of {cap}")]
    ExpansionCap { terms: u128, cap: u128 },

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

/// False for zero, negatives and NaN.
pub(crate) fn positive(v: f64) -> bool {
    v > 0.0
}
