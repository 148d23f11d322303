use thiserror::Error;

/// Errors produced by the fidelity toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested exact computation exceeds its enumeration budget.
    #[error("too large: {0}")]
    TooLarge(String),

    /// A closed-form bound was evaluated outside the range where it is stated.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("auc undefined: {0}")]
    UndefinedAuc(String),

    #[error("bridge error: {0}")]
    Bridge(String),

    #[error("malformed data: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
