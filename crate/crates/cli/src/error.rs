use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, ranges or config contents.
    #[error("usage error: {0}")]
    Usage(String),
    /// State budget exceeded, numeric failure or I/O trouble.
    #[error("error: {0}")]
    Resource(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn resource(msg: impl ToString) -> Self {
        CliError::Resource(msg.to_string())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Resource(_) => ExitCode::from(3),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::resource(e)
    }
}
