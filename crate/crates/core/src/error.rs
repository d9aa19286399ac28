use alloc::string::String;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("weights sum to {0}, expected 1")]
    WeightNormalization(f64),
    #[error("subset of degree {degree} exceeds coefficient degree {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("reduced space is ill conditioned: smallest singular value {sigma_min} < {threshold}")]
    ConditionFailure { sigma_min: f64, threshold: f64 },
    #[error("shrinkage program is infeasible")]
    ShrinkageInfeasible,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
