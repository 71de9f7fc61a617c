//! The policy interface shared by environments, evaluation, and dataset
//! collection.

use crate::rng::StreamRng;
use rand::Rng;

/// Maps states to actions in `[-1, 1]^dA`. `deterministic` selects the mean
/// action (used for evaluation rollouts) instead of sampling.
pub trait Policy {
    fn act(&self, state: &[f64], deterministic: bool, rng: &mut StreamRng) -> Vec<f64>;
}

/// Uniform random policy over the action box. Defines the `random` dataset
/// tier and the warmup phase of online training.
#[derive(Debug, Clone, Copy)]
pub struct UniformPolicy {
    pub action_dim: usize,
}

impl Policy for UniformPolicy {
    fn act(&self, _state: &[f64], _deterministic: bool, rng: &mut StreamRng) -> Vec<f64> {
        (0..self.action_dim)
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect()
    }
}
