//! Function approximation for the off-dynamics RL suite: a small reverse-mode
//! autodiff tape over batched arrays, ReLU MLPs with flat parameter vectors,
//! tanh-Gaussian policies, twin/ensemble critics, a conditional VAE, Adam,
//! polyak averaging, finite-difference gradient checking, and bit-exact
//! checkpoints.

pub mod checkpoint;
pub mod critic;
pub mod cvae;
pub mod error;
pub mod gradcheck;
pub mod mlp;
pub mod optim;
pub mod policy;
pub mod tape;

pub use checkpoint::Checkpoint;
pub use critic::{CriticEnsemble, TwinCritics};
pub use cvae::{Cvae, CvaeSpec};
pub use error::NnError;
pub use gradcheck::{grad_check, GradCheck};
pub use mlp::{col_vec, rows_to_array, Mlp, MlpLayout, Params};
pub use optim::{polyak_update, Adam, DEFAULT_LR, DEFAULT_POLYAK};
pub use policy::{GaussianPolicy, PolicySample, LOG_STD_MAX, LOG_STD_MIN};
pub use tape::{GroupId, Tape, Var};
