use crate::domain::Domain;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("unknown environment family `{0}`")]
    UnknownFamily(String),
    #[error("unknown shift type `{0}`")]
    UnknownShiftType(String),
    #[error("invalid shift level `{0}`")]
    InvalidShiftLevel(String),
    #[error("malformed task name `{0}`")]
    MalformedTaskName(String),
    #[error("cannot sample from empty {0} buffer")]
    EmptyBuffer(Domain),
}
