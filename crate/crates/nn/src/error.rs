use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("parameter shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("loss is not finite: {0}")]
    NonFiniteLoss(f64),
    #[error("checkpoint file corrupt: {0}")]
    CorruptFile(String),
    #[error("checkpoint schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
