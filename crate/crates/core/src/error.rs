use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },

    #[error("point {index} violates the norm constraint: |x|^2 = {norm_sq}, expected {expected}")]
    NormConstraint { index: usize, norm_sq: f64, expected: f64 },

    /// A combinatorial or quadrature budget would be exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// The lower-tail event is not rare: the threshold sits at or above the mean.
    #[error(
        "threshold L*N = {threshold} is not below the mean {mean} of the quadratic form; the lower tail is not rare"
    )]
    Regime { threshold: f64, mean: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
