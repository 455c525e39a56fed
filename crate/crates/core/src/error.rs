use thiserror::Error;

pub type Result<T> = std::result::Result<T, GroverError>;

#[derive(Debug, Error)]
pub enum GroverError {
    #[error("invalid problem shape: {0}")]
    InvalidShape(String),

    /// The requested quantity is not defined for this shape (e.g. a solution
    /// amplitude when there are no solutions).
    #[error("{op} is undefined for N={n}, t={t}: {reason}")]
    Undefined {
        op: &'static str,
        n: u64,
        t: u64,
        reason: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("state is not normalized (norm² = {0})")]
    Unnormalized(f64),

    #[error("{0} must be a power of two >= 2, got {1}")]
    NotPowerOfTwo(&'static str, usize),

    #[error("operator is invalid: {0}")]
    InvalidOperator(String),

    #[error("bad snapshot: {0}")]
    BadSnapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
