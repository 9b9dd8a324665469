use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration; nothing was computed.
    #[error("{0}")]
    Usage(String),

    #[error("numeric failure in {stage}: {message}")]
    Numeric { stage: String, message: String },

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn numeric(stage: &str, msg: impl Into<String>) -> Self {
        CliError::Numeric {
            stage: stage.to_string(),
            message: msg.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric { .. } | CliError::Io { .. } => 1,
        }
    }
}

impl From<nodal_radial::Error> for CliError {
    fn from(e: nodal_radial::Error) -> Self {
        use nodal_radial::Error as E;
        match e {
            E::Config(m) => CliError::Usage(m),
            // inputs are validated up front, so a domain error here comes from a study stage
            E::Domain(m) => CliError::numeric("analysis", m),
            E::Numeric { stage, message } => CliError::numeric(stage, message),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
