//! Shared vocabulary for the off-dynamics RL suite.
//!
//! Everything downstream (environments, agents, dataset tooling, the
//! experiment runner) speaks in terms of the types defined here:
//!
//! - [`Transition`] — one environment step, tagged with its [`Domain`].
//! - [`TaskId`] — a parsed benchmark task name such as `ant-friction-0.5`.
//! - [`ReplayBuffer`] and [`sample_symmetric`] — FIFO stores plus the
//!   symmetric dual-domain minibatch sampler every agent uses.
//! - [`RngBundle`] — named, independent RNG streams so that runs are
//!   reproducible bit-for-bit.
//! - [`par`] — data-parallel map helpers backed by rayon, with a sequential
//!   fallback when the `parallel` feature is disabled.

pub mod buffer;
pub mod checksum;
pub mod domain;
pub mod error;
pub mod par;
pub mod policy;
pub mod rng;
pub mod task;

pub use buffer::{sample_symmetric, DualBatch, DualBuffers, ReplayBuffer};
pub use domain::{Domain, Transition};
pub use error::CoreError;
pub use policy::{Policy, UniformPolicy};
pub use rng::{stream_rng, RngBundle, StreamRng};
pub use task::{EnvFamily, ShiftLevel, ShiftType, TaskId};
