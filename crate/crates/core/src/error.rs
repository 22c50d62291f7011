use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite input in {0}")]
    NonFinite(&'static str),

    #[error("invalid weight {value} at index {index}: weights must be finite and positive")]
    InvalidWeight { index: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domination fails: {0}")]
    DominationFails(String),

    #[error("no admissible rho > 1: {0}")]
    NoAdmissibleRho(String),

    #[error("interlacing violated: {0}")]
    Interlacing(String),

    #[error("near-multiple zero detected: {0}")]
    NearMultipleZero(String),

    #[error("zero splitting inconsistent: {0}")]
    SplittingInconsistent(String),

    #[error("negative radicand in {0}")]
    NegativeRadicand(String),

    #[error("perturbation retries exhausted after {0} attempts")]
    RetriesExhausted(usize),

    #[error("iteration cap reached in {routine} after {iterations} iterations")]
    IterationCap { routine: &'static str, iterations: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("degree bound violated: {0}")]
    DegreeBound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
