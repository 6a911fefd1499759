use std::path::Path;

use rescue_service::ServiceError;
use rescue_text::TextError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] rescue_core::Error),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// 2 for bad input (flags, files, validation), 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(rescue_core::Error::Io(_)) => 1,
            CliError::Core(_) => 2,
            CliError::Text(TextError::Io(_)) => 1,
            CliError::Text(_) => 2,
            CliError::Service(ServiceError::Invalid(_) | ServiceError::Core(_) | ServiceError::Conflict(_)) => 2,
            CliError::Service(_) => 1,
            CliError::Runtime(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn write_output(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}
