use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The model does not know θ at the requested point. Distinct from
    /// invalid input: the query is well-formed, the model just cannot answer it.
    #[error("insufficient model data: theta is unknown at {0}")]
    InsufficientModelData(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("non-monotone cdf: {0}")]
    NonMonotoneCdf(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn is_insufficient_data(&self) -> bool {
        matches!(self, Error::InsufficientModelData(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
