use thiserror::Error;

/// Errors raised by tensor, linear-algebra, model and I/O operations.
///
/// Indices reported in messages are 1-based.
#[derive(Debug, Error)]
pub enum MteqError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid tensor shape: order {order}, dimension {dim}")]
    InvalidShape { order: usize, dim: usize },

    #[error("tensor has {found} entries, expected {expected}")]
    EntryCount { expected: usize, found: usize },

    #[error("non-finite entry at flat position {0}")]
    NonFinite(usize),

    #[error("negative entry at flat position {0}")]
    NegativeEntry(usize),

    #[error("order {order} exceeds the symmetrization limit {limit}")]
    OrderTooLarge { order: usize, limit: usize },

    #[error("problem size n^m = {entries} exceeds the limit {limit}")]
    SizeGuard { entries: u128, limit: u128 },

    #[error("point outside the positive orthant: component {index} = {value:e}")]
    Domain { index: usize, value: f64 },

    #[error("singular system: pivot {pivot:e} in column {column} below threshold {threshold:e}")]
    SingularSystem {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("weight vector must be strictly positive (component {index} = {value:e})")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = MteqError> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(MteqError::DimensionMismatch { expected, found })
    }
}
