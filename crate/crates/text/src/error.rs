use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("corpus line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("length mismatch: {predicted} predictions vs {gold} gold rows")]
    LengthMismatch { predicted: usize, gold: usize },
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("model file: {0}")]
    Model(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = TextError> = std::result::Result<T, E>;
