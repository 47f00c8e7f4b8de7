use thiserror::Error;

/// Error type shared across the workbench.
#[derive(Debug, Error)]
pub enum ChaosError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("integration failed at step {step}: {message}")]
    Integration { step: usize, message: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("schema mismatch at row {row}: {message}")]
    Schema { row: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ChaosError>;
