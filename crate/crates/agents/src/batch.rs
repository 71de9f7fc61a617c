//! Transition minibatches as dense arrays.

use crate::error::AgentError;
use ndarray::{Array1, Array2};
use offdyn_core::{DualBatch, Transition};

#[derive(Debug, Clone)]
pub struct BatchArrays {
    pub states: Array2<f64>,
    pub actions: Array2<f64>,
    pub rewards: Array1<f64>,
    pub next_states: Array2<f64>,
    /// 1.0 for terminal transitions (bootstrapping stops), else 0.0.
    pub done: Array1<f64>,
}

impl BatchArrays {
    pub fn from_transitions(transitions: &[Transition]) -> Result<Self, AgentError> {
        if transitions.is_empty() {
            return Err(AgentError::EmptyBatch);
        }
        let n = transitions.len();
        let ds = transitions[0].state.len();
        let da = transitions[0].action.len();
        let mut states = Array2::zeros((n, ds));
        let mut actions = Array2::zeros((n, da));
        let mut rewards = Array1::zeros(n);
        let mut next_states = Array2::zeros((n, ds));
        let mut done = Array1::zeros(n);
        for (r, t) in transitions.iter().enumerate() {
            for (c, v) in t.state.iter().enumerate() {
                states[[r, c]] = *v;
            }
            for (c, v) in t.action.iter().enumerate() {
                actions[[r, c]] = *v;
            }
            for (c, v) in t.next_state.iter().enumerate() {
                next_states[[r, c]] = *v;
            }
            rewards[r] = t.reward;
            done[r] = if t.done { 1.0 } else { 0.0 };
        }
        Ok(BatchArrays { states, actions, rewards, next_states, done })
    }

    pub fn len(&self) -> usize {
        self.states.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn state_dim(&self) -> usize {
        self.states.ncols()
    }

    pub fn action_dim(&self) -> usize {
        self.actions.ncols()
    }

    /// Copy with the rewards replaced (used by reward-relabeling agents).
    pub fn with_rewards(&self, rewards: Array1<f64>) -> Self {
        assert_eq!(rewards.len(), self.len());
        BatchArrays { rewards, ..self.clone() }
    }
}

#[derive(Debug, Clone)]
pub struct DualBatchArrays {
    pub src: BatchArrays,
    pub tar: BatchArrays,
}

impl DualBatchArrays {
    pub fn from_dual(batch: &DualBatch) -> Result<Self, AgentError> {
        Ok(DualBatchArrays {
            src: BatchArrays::from_transitions(&batch.src)?,
            tar: BatchArrays::from_transitions(&batch.tar)?,
        })
    }

    pub fn total(&self) -> usize {
        self.src.len() + self.tar.len()
    }
}
