use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state is not normalized: |amp0|^2 + |amp1|^2 = {norm_sqr}")]
    Normalization { norm_sqr: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: strategy has {strategy} values, game has d = {game}")]
    DimensionMismatch { strategy: usize, game: usize },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("invalid record at {location}: {reason}")]
    InvalidRecord { location: String, reason: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
