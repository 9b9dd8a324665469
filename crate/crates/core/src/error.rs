use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration detected before any computation started.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical stage failed (bracketing, step control, quadrature, ...).
    #[error("numeric failure in {stage}: {message}")]
    Numeric { stage: &'static str, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numeric(stage: &'static str, msg: impl Into<String>) -> Self {
        Error::Numeric {
            stage,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
