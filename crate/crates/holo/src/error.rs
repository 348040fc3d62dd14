use thiserror::Error;

#[derive(Debug, Error)]
pub enum HoloError {
    #[error(transparent)]
    Core(#[from] holo_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad input: {0}")]
    Format(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("usage: {0}")]
    Usage(String),
}

pub type HoloResult<T> = Result<T, HoloError>;
