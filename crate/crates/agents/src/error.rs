use offdyn_nn::NnError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("empty batch")]
    EmptyBatch,
    #[error("batch weights are degenerate (all equal)")]
    DegenerateBatch,
    #[error("behavior model has not been trained yet")]
    CvaeUntrained,
    #[error("dynamics ensemble has not been trained yet")]
    EnsembleUntrained,
    #[error("loss is not finite: {0}")]
    NonFiniteLoss(f64),
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error(transparent)]
    Nn(#[from] NnError),
}
