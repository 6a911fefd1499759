use thiserror::Error;

/// Errors raised by the dispatch core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no weight configured for environment key `{0}`")]
    MissingEnvWeight(String),

    #[error("no distance entry for `{from}` -> `{to}`")]
    DistanceLookup { from: String, to: String },

    #[error("location mismatch: {0}")]
    Location(String),

    #[error("invalid observation: {0}")]
    Observation(String),

    #[error("invalid time `{0}`, expected HH:MM or integer minutes")]
    Time(String),

    #[error("scenario validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("{0}")]
    Io(String),

    #[error("invalid workload spec: {0}")]
    Workload(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
