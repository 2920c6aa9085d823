use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke a documented precondition (shape, range, membership).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A truncated kernel lost more mass than the caller tolerates.
    #[error("truncation radius {radius} too small: deficit {deficit:e} exceeds tolerance {tolerance:e}")]
    RadiusTooSmall {
        radius: i64,
        deficit: f64,
        tolerance: f64,
    },

    /// Evaluation outside the domain of a density or function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Non-finite numeric input or output.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
