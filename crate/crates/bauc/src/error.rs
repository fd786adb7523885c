use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by the numerical kernel, the estimators, and the harness.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Incompatible matrix/vector shapes, reported separately from
    /// numerical failures so callers can tell a wiring bug from bad data.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Cholesky pivot fell below tolerance: the matrix is not positive
    /// definite (or is singular to working precision).
    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// A scalar argument is outside its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A dataset (or score/label sequence) is missing one of the classes.
    #[error("class {0} has no samples")]
    MissingClass(u8),

    /// Not enough samples for the requested operation.
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    /// The weight vector is zero, so the score direction (and its AUC)
    /// is undefined.
    #[error("undefined direction: weight vector is zero")]
    ZeroWeights,

    /// An iterative routine ran out of iterations.
    #[error("no convergence after {iterations} iterations ({context})")]
    NonConvergence { iterations: usize, context: String },

    /// Scenario or estimator configuration is inconsistent.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// CSV/JSON ingestion failure with location information.
    #[error("parse error: {0}")]
    Parse(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
