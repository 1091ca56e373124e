use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A price or trade size outside the domain of the function evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Marginal liquidity of the liquid venue is zero or negative.
    #[error("degenerate liquidity: slope magnitude {0} must be positive")]
    DegenerateLiquidity(f64),

    /// A trade would drain the pool's risky reserves.
    #[error("reserve exhaustion: trade {dx} against reserves {reserves}")]
    ReserveExhaustion { dx: f64, reserves: f64 },

    /// A configuration field failed validation.
    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: u64, reason: String },

    /// A parsed order book violates a snapshot invariant.
    #[error("invalid snapshot: {0}")]
    Validation(String),

    #[error("insufficient levels: {0}")]
    InsufficientLevels(String),

    #[error("zero variance in regressor: {0}")]
    ZeroVariance(String),

    #[error("path {index} failed: {source}")]
    Path { index: usize, source: Box<Error> },

    #[error("{failed} of {total} paths failed; first: {first}")]
    Experiment {
        failed: usize,
        total: usize,
        first: Box<Error>,
    },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
