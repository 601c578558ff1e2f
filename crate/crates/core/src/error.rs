use thiserror::Error;

/// Errors produced while building or analysing Gaussian states.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unphysical state: {0}")]
    UnphysicalState(String),

    #[error("duplicate mode label `{0}`")]
    DuplicateMode(String),

    #[error("invalid mode selection: {0}")]
    InvalidSelection(String),

    #[error("malformed state: {0}")]
    MalformedState(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unsupported partition: {0}")]
    UnsupportedPartition(String),

    #[error("no separability boundary in the bracket [{lo}, {hi}]")]
    NoBoundary { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
