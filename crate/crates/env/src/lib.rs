//! Desk-scale dynamics-shift environments plus the MuJoCo XML task-variant
//! emitter.
//!
//! Three families are simulated directly (point mass, two-link reacher, and
//! a sparse-reward point maze), each with parametric friction / gravity /
//! kinematic / morphology / layout shifts applied to the base dynamics. The
//! MuJoCo, AntMaze, and Adroit task names from the benchmark emit their model
//! mutations as XML fragment files instead of being simulated.

pub mod dynamics;
pub mod error;
pub mod layouts;
pub mod make;
pub mod params;
pub mod references;
pub mod xml;

pub use dynamics::{reset, step, DeskEnv, StepResult};
pub use error::EnvError;
pub use layouts::{large_layout, medium_layout, small_layout, Layout};
pub use make::{make_env, make_source_env};
pub use params::{base_env, EnvParams, EnvState, ACTION_DIM, STATE_DIM};
pub use references::{reference_returns, ReferenceEntry, ReferenceRegistry};
pub use xml::{emit_all, emit_mujoco_xml};
