//! Domain classifier pair and the quantities derived from it: the reward
//! penalty, the clipped importance weight, and the per-batch normalized
//! weight.
//!
//! `q_sas` scores `(s, a, s')` tuples and `q_sa` scores `(s, a)` pairs, each
//! predicting the probability that the sample came from the target domain.
//! The penalty
//! `dr = -log[ q_sas(tar) q_sa(src) / (q_sas(src) q_sa(tar)) ]`
//! estimates the negative dynamics gap, so `-dr` estimates
//! `log p_tar(s'|s,a) / p_src(s'|s,a)`.

use crate::batch::DualBatchArrays;
use crate::error::AgentError;
use ndarray::{Array1, Array2};
use offdyn_core::StreamRng;
use offdyn_nn::{Adam, Mlp, MlpLayout, Tape};
use rand_distr::{Distribution, StandardNormal};

/// Probability clamp for log stability.
pub const PROB_CLAMP: f64 = 1e-7;
/// Importance weights are clipped into this range.
pub const OMEGA_RANGE: (f64, f64) = (1e-4, 1.0);
/// Standard deviation of the Gaussian input noise applied while training.
pub const DEFAULT_INPUT_NOISE: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct DomainClassifierPair {
    pub q_sas: Mlp,
    pub q_sa: Mlp,
    opt_sas: Adam,
    opt_sa: Adam,
    pub input_noise_std: f64,
    pub train_steps: u64,
}

fn concat_rows(parts: &[&Array2<f64>]) -> Array2<f64> {
    let rows = parts[0].nrows();
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = Array2::zeros((rows, cols));
    let mut off = 0;
    for p in parts {
        out.slice_mut(ndarray::s![.., off..off + p.ncols()]).assign(p);
        off += p.ncols();
    }
    out
}

fn add_noise(x: &Array2<f64>, std: f64, rng: &mut StreamRng) -> Array2<f64> {
    let mut y = x.clone();
    for v in y.iter_mut() {
        let n: f64 = StandardNormal.sample(rng);
        *v += std * n;
    }
    y
}

impl DomainClassifierPair {
    pub fn new(state_dim: usize, action_dim: usize, hidden: &[usize], lr: f64, rng: &mut StreamRng) -> Self {
        let q_sas = Mlp::new(MlpLayout::new(2 * state_dim + action_dim, hidden, 1), rng);
        let q_sa = Mlp::new(MlpLayout::new(state_dim + action_dim, hidden, 1), rng);
        let opt_sas = Adam::new(lr, q_sas.params.len());
        let opt_sa = Adam::new(lr, q_sa.params.len());
        DomainClassifierPair {
            q_sas,
            q_sa,
            opt_sas,
            opt_sa,
            input_noise_std: DEFAULT_INPUT_NOISE,
            train_steps: 0,
        }
    }

    /// One Adam step on both cross-entropy losses. Gaussian noise of std
    /// `input_noise_std` is added to the classifier inputs during training
    /// only; penalty evaluation sees clean inputs.
    pub fn train_step(&mut self, batch: &DualBatchArrays, rng: &mut StreamRng) -> Result<f64, AgentError> {
        if batch.src.is_empty() || batch.tar.is_empty() {
            return Err(AgentError::EmptyBatch);
        }
        let std = self.input_noise_std;
        let src_sas = add_noise(
            &concat_rows(&[&batch.src.states, &batch.src.actions, &batch.src.next_states]),
            std,
            rng,
        );
        let tar_sas = add_noise(
            &concat_rows(&[&batch.tar.states, &batch.tar.actions, &batch.tar.next_states]),
            std,
            rng,
        );
        let src_sa = add_noise(&concat_rows(&[&batch.src.states, &batch.src.actions]), std, rng);
        let tar_sa = add_noise(&concat_rows(&[&batch.tar.states, &batch.tar.actions]), std, rng);

        let loss_sas = bce_step(&mut self.q_sas, &mut self.opt_sas, &tar_sas, &src_sas)?;
        let loss_sa = bce_step(&mut self.q_sa, &mut self.opt_sa, &tar_sa, &src_sa)?;
        self.train_steps += 1;
        Ok(loss_sas + loss_sa)
    }

    /// Target-domain probabilities from both classifiers, clamped into
    /// `[PROB_CLAMP, 1 - PROB_CLAMP]`.
    pub fn probabilities(
        &self,
        states: &Array2<f64>,
        actions: &Array2<f64>,
        next_states: &Array2<f64>,
    ) -> (Array1<f64>, Array1<f64>) {
        let sas = concat_rows(&[states, actions, next_states]);
        let sa = concat_rows(&[states, actions]);
        let p_sas = self
            .q_sas
            .forward_eval(&sas)
            .column(0)
            .mapv(|z| sigmoid(z).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP));
        let p_sa = self
            .q_sa
            .forward_eval(&sa)
            .column(0)
            .mapv(|z| sigmoid(z).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP));
        (p_sas, p_sa)
    }

    /// Reward penalty per sample:
    /// `dr = -log[ q_sas(tar) q_sa(src) / (q_sas(src) q_sa(tar)) ]`.
    pub fn darc_penalty(
        &self,
        states: &Array2<f64>,
        actions: &Array2<f64>,
        next_states: &Array2<f64>,
    ) -> Array1<f64> {
        let (p_sas, p_sa) = self.probabilities(states, actions, next_states);
        Array1::from_iter(
            p_sas
                .iter()
                .zip(p_sa.iter())
                .map(|(&sas, &sa)| penalty_from_probs(sas, sa)),
        )
    }

    /// Importance weight `omega = exp(-dr)` clipped to `[1e-4, 1]`.
    pub fn importance_weight(
        &self,
        states: &Array2<f64>,
        actions: &Array2<f64>,
        next_states: &Array2<f64>,
    ) -> Array1<f64> {
        self.darc_penalty(states, actions, next_states)
            .mapv(|dr| (-dr).exp().clamp(OMEGA_RANGE.0, OMEGA_RANGE.1))
    }

    /// Per-batch normalized weights: the log-ratio estimates are shifted to
    /// be non-negative within the batch and normalized to sum to one. When
    /// all estimates are equal the weights fall back to uniform `1/n`.
    pub fn batch_weight(
        &self,
        states: &Array2<f64>,
        actions: &Array2<f64>,
        next_states: &Array2<f64>,
    ) -> Result<Array1<f64>, AgentError> {
        if states.nrows() == 0 {
            return Err(AgentError::EmptyBatch);
        }
        // u(s,a) is the classifier's log-ratio estimate on the observed
        // transition, i.e. -dr.
        let u = self
            .darc_penalty(states, actions, next_states)
            .mapv(|dr| -dr);
        Ok(normalize_batch_weights(u.as_slice().unwrap()))
    }
}

/// Shift-to-nonnegative then normalize; uniform fallback when degenerate.
pub fn normalize_batch_weights(u: &[f64]) -> Array1<f64> {
    let n = u.len();
    let min = u.iter().cloned().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = u.iter().map(|v| v - min).collect();
    let total: f64 = shifted.iter().sum();
    if total <= 0.0 {
        return Array1::from_elem(n, 1.0 / n as f64);
    }
    Array1::from_iter(shifted.iter().map(|v| v / total))
}

pub fn penalty_from_probs(p_sas_tar: f64, p_sa_tar: f64) -> f64 {
    let ratio = (p_sas_tar * (1.0 - p_sa_tar)) / ((1.0 - p_sas_tar) * p_sa_tar);
    -ratio.ln()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Logistic-loss step: target-domain rows labeled 1, source rows labeled 0.
/// Returns the loss value.
fn bce_step(
    net: &mut Mlp,
    opt: &mut Adam,
    tar_inputs: &Array2<f64>,
    src_inputs: &Array2<f64>,
) -> Result<f64, AgentError> {
    let mut tape = Tape::new();
    let g = tape.register(&net.params.0, true);

    // -log sigmoid(z) = softplus(-z); -log(1 - sigmoid(z)) = softplus(z).
    let t_in = tape.input(tar_inputs.clone());
    let z_tar = net.layout.forward_tape(&mut tape, g, t_in);
    let neg_z = tape.neg(z_tar);
    let sp_tar = tape.softplus(neg_z);
    let tar_sum = tape.sum_all(sp_tar);

    let s_in = tape.input(src_inputs.clone());
    let z_src = net.layout.forward_tape(&mut tape, g, s_in);
    let sp_src = tape.softplus(z_src);
    let src_sum = tape.sum_all(sp_src);

    let t_mean = tape.mul_scalar(tar_sum, 1.0 / tar_inputs.nrows() as f64);
    let s_mean = tape.mul_scalar(src_sum, 1.0 / src_inputs.nrows() as f64);
    let loss = tape.add(t_mean, s_mean);
    let loss_val = tape.scalar(loss);
    if !loss_val.is_finite() {
        return Err(AgentError::NonFiniteLoss(loss_val));
    }
    tape.backward(loss);
    let grads = tape.group_grad(g).to_vec();
    opt.step(&mut net.params.0, &grads)?;
    Ok(loss_val)
}
