use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-smooth loss: {0}")]
    NonSmoothLoss(String),
    #[error("solver requires convex loss, got {0}")]
    NonConvexLoss(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("infeasible point")]
    InfeasiblePoint,
    #[error("negative coordinate at index {0}")]
    NegativeCoordinate(usize),
    #[error("gradient undefined at boundary (coordinate {0} is zero)")]
    BoundaryGradient(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("instance stream exhausted after {0} rounds")]
    StreamExhausted(usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("missing bound input: {0}")]
    MissingField(&'static str),
    #[error("margin too large relative to b")]
    MarginTooLarge,
    #[error("too few usable rows for slope fit: {0} (need at least 3)")]
    TooFewRows(usize),
    #[error("incompatible configuration: {0}")]
    Incompatible(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
