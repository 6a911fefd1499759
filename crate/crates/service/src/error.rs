use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    NotFound(String),
    #[error("validation failed: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("event log: {0}")]
    Log(String),
    #[error(transparent)]
    Core(#[from] rescue_core::Error),
}

impl ServiceError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        ServiceError::Invalid(vec![msg.into()])
    }
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;
