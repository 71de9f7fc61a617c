//! Off-dynamics RL agents.
//!
//! Four families, organized by whether each domain is online or offline:
//!
//! - [`online`] — SAC trained on both domains, importance weighting, reward
//!   correction, dynamics-ensemble value filtering, representation mismatch.
//! - [`hybrid`] — the regularized variants for mixed online/offline domains
//!   (behavior cloning, conservative value penalties, pseudo-target value
//!   training, critic-ensemble distillation, classifier-weighted hybrids).
//! - [`offline`] — expectile-based offline learning, TD3 with behavior
//!   cloning, classifier reward relabeling, and support-constrained
//!   optimization.
//! - [`classifiers`] — the domain classifier pair all of the above share.

pub mod batch;
pub mod classifiers;
pub mod error;
pub mod hybrid;
pub mod offline;
pub mod online;
pub mod sac;

pub use batch::{BatchArrays, DualBatchArrays};
pub use classifiers::DomainClassifierPair;
pub use error::AgentError;
pub use sac::{SacConfig, SacCore, UpdateStats};
