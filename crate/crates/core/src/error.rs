use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("timing constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("degenerate sequence: all time moments up to order {0} vanish")]
    DegenerateSequence(usize),
    #[error("spectrum not locally integrable: {0}")]
    NonIntegrable(String),
    #[error("not convergent: {0}")]
    NotConvergent(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("bath dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
