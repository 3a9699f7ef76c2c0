use thiserror::Error;

use crate::construction::Scheme;

/// Errors raised by the coding toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid reliability ordering: {0}")]
    InvalidOrdering(String),

    #[error("invalid rate profile: {0}")]
    InvalidProfile(String),

    #[error("scheme mismatch: expected {expected}, got {actual}")]
    SchemeMismatch { expected: String, actual: Scheme },

    #[error("{0} is not a minimum-weight coset leader")]
    NotMinimumWeightLeader(usize),

    #[error("no codeword found up to weight {0}")]
    SearchExhausted(usize),

    #[error("exhaustive search infeasible: {0}")]
    SearchInfeasible(String),

    #[error("non-finite LLR at position {0}")]
    NonFiniteLlr(usize),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
