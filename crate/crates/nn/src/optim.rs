//! Adam and polyak (exponential moving average) parameter updates.

use crate::error::NnError;

pub const DEFAULT_LR: f64 = 3e-4;
pub const DEFAULT_POLYAK: f64 = 5e-3;

/// Adam with bias correction. Moment estimates live here; the parameters
/// themselves are owned by the model as a flat vector.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
}

impl Adam {
    pub fn new(lr: f64, n_params: usize) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Moment estimates and step counter, for checkpointing.
    pub fn state(&self) -> (&[f64], &[f64], u64) {
        (&self.m, &self.v, self.step)
    }

    pub fn restore(&mut self, m: &[f64], v: &[f64], step: u64) -> Result<(), NnError> {
        if m.len() != self.m.len() || v.len() != self.v.len() {
            return Err(NnError::ShapeMismatch { expected: self.m.len(), got: m.len() });
        }
        self.m.copy_from_slice(m);
        self.v.copy_from_slice(v);
        self.step = step;
        Ok(())
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<(), NnError> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(NnError::ShapeMismatch {
                expected: self.m.len(),
                got: grads.len(),
            });
        }
        self.step += 1;
        let b1t = 1.0 - self.beta1.powi(self.step as i32);
        let b2t = 1.0 - self.beta2.powi(self.step as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let mhat = self.m[i] / b1t;
            let vhat = self.v[i] / b2t;
            params[i] -= self.lr * mhat / (vhat.sqrt() + self.eps);
        }
        Ok(())
    }
}

/// `target <- (1 - rate) * target + rate * online`, elementwise.
pub fn polyak_update(target: &mut [f64], online: &[f64], rate: f64) -> Result<(), NnError> {
    if target.len() != online.len() {
        return Err(NnError::ShapeMismatch {
            expected: target.len(),
            got: online.len(),
        });
    }
    debug_assert!((0.0..=1.0).contains(&rate));
    for (t, o) in target.iter_mut().zip(online) {
        *t = (1.0 - rate) * *t + rate * *o;
    }
    Ok(())
}
