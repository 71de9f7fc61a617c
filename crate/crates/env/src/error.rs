use offdyn_core::task::EnvFamily;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("unknown maze layout `{0}`")]
    UnknownLayout(String),
    #[error("shift `{shift}` is not supported for family `{family}`", shift = .shift, family = .family.as_str())]
    ShiftNotSupportedForFamily { family: EnvFamily, shift: String },
    #[error("task `{0}` has no runnable desk-scale simulation")]
    NotSimulated(String),
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("no reference returns recorded for task `{0}`")]
    MissingReference(String),
    #[error("degenerate reference for task `{task}`: expert {expert} <= random {random}")]
    DegenerateReference { task: String, expert: f64, random: f64 },
    #[error("reference registry parse error: {0}")]
    RegistryParse(String),
}
