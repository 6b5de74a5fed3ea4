use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("sparsity level {s} is outside 1..={max} for dimension {n}", max = n.saturating_sub(1))]
    InvalidSparsity { s: usize, n: usize },

    #[error("operation needs 0 < nnz(x) < n, got nnz = {nnz} with n = {n}")]
    DegenerateSupport { nnz: usize, n: usize },

    #[error("initial point is not feasible: {0}")]
    InfeasibleStart(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("enumeration too large: {count} supports exceeds the limit of {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },

    #[error("invalid instance parameters: {0}")]
    InvalidInstance(String),

    #[error("line search did not terminate after {0} trial steps")]
    LineSearchFailed(usize),

    #[error("non-finite value encountered: {0}")]
    NonFinite(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
