use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not positive semi-definite (pivot {pivot:e} below -{threshold:e})")]
    NotPsd { pivot: f64, threshold: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A projection residual came out clearly negative.
    #[error("numerical inconsistency: ALD residual {residual:e} is negative beyond tolerance")]
    NumericalInconsistency { residual: f64 },

    #[error("rank-deficient design ({rank} of {cols} columns independent); use ridge > 0")]
    RankDeficient { rank: usize, cols: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, message: msg.into() }
    }
}
