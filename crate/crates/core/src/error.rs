use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix or vector shapes do not conform.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A matrix that must be inverted is singular or numerically rank deficient.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// Multilateration failed to converge.
    #[error("position estimation failed: {0}")]
    EstimationFailure(String),

    /// A scenario description is inconsistent. The first field is the key path.
    #[error("invalid configuration at `{key}`: {message}")]
    Config { key: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
