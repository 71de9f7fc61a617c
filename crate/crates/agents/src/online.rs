//! Online-online algorithms: the classifier-corrected SAC variants, the
//! dynamics-ensemble filtering agent, and the representation-mismatch agent.

use crate::batch::{BatchArrays, DualBatchArrays};
use crate::classifiers::DomainClassifierPair;
use crate::error::AgentError;
use crate::sac::{actor_step, col, critic_step, BcAttachment, SacConfig, SacCore, TdTerm, UpdateStats, NO_EXTRA};
use ndarray::{Array1, Array2};
use offdyn_core::{par, Domain, StreamRng};
use offdyn_nn::critic::stack_state_action;
use offdyn_nn::{Adam, GaussianPolicy, Mlp, MlpLayout, Tape};
use serde::{Deserialize, Serialize};

/// DARC: train the classifier pair, relabel source rewards with the penalty,
/// then run the plain SAC update on the relabeled dual batch.
#[derive(Debug, Clone)]
pub struct DarcAgent {
    pub sac: SacCore,
    pub classifiers: DomainClassifierPair,
}

impl DarcAgent {
    pub fn new(state_dim: usize, action_dim: usize, cfg: SacConfig, classifier_hidden: &[usize], rng: &mut StreamRng) -> Self {
        let sac = SacCore::new(state_dim, action_dim, cfg, rng);
        let classifiers = DomainClassifierPair::new(state_dim, action_dim, classifier_hidden, sac.cfg.lr, rng);
        DarcAgent { sac, classifiers }
    }

    pub fn update(&mut self, batch: &DualBatchArrays, rng: &mut StreamRng) -> Result<UpdateStats, AgentError> {
        let aux_loss = self.classifiers.train_step(batch, rng)?;
        let dr = self
            .classifiers
            .darc_penalty(&batch.src.states, &batch.src.actions, &batch.src.next_states);
        // Source rewards only; target rewards are never modified.
        let relabeled = Array1::from_iter(batch.src.rewards.iter().zip(dr.iter()).map(|(r, d)| r - d));
        let mut stats = self.sac.update_weighted(batch, Some(&relabeled), None, rng)?;
        stats.aux_loss = aux_loss;
        Ok(stats)
    }
}

/// SAC with importance-weighted source TD residuals.
#[derive(Debug, Clone)]
pub struct SacIwAgent {
    pub sac: SacCore,
    pub classifiers: DomainClassifierPair,
}

impl SacIwAgent {
    pub fn new(state_dim: usize, action_dim: usize, cfg: SacConfig, classifier_hidden: &[usize], rng: &mut StreamRng) -> Self {
        let sac = SacCore::new(state_dim, action_dim, cfg, rng);
        let classifiers = DomainClassifierPair::new(state_dim, action_dim, classifier_hidden, sac.cfg.lr, rng);
        SacIwAgent { sac, classifiers }
    }

    pub fn update(&mut self, batch: &DualBatchArrays, rng: &mut StreamRng) -> Result<UpdateStats, AgentError> {
        let aux_loss = self.classifiers.train_step(batch, rng)?;
        let omega = self
            .classifiers
            .importance_weight(&batch.src.states, &batch.src.actions, &batch.src.next_states);
        let mut stats = self.sac.update_weighted(batch, None, Some(&omega), rng)?;
        stats.aux_loss = aux_loss;
        Ok(stats)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VgdfConfig {
    pub ensemble_size: usize,
    pub dynamics_hidden: Vec<usize>,
    /// Share of source samples kept per batch, in percent.
    pub xi_percent: f64,
    pub explore_hidden: Vec<usize>,
}

impl Default for VgdfConfig {
    fn default() -> Self {
        VgdfConfig {
            ensemble_size: 7,
            dynamics_hidden: vec![200, 200, 200, 200, 200],
            xi_percent: 25.0,
            explore_hidden: vec![256, 256],
        }
    }
}

impl VgdfConfig {
    pub fn desk() -> Self {
        VgdfConfig {
            dynamics_hidden: vec![64, 64],
            explore_hidden: vec![32, 32],
            ..Default::default()
        }
    }
}

const DYN_LOGVAR_RANGE: (f64, f64) = (-10.0, 4.0);
const FVP_VAR_FLOOR: f64 = 1e-12;

/// Top-`xi%` indices by score, largest first; ties break toward the lower
/// batch index. Always selects `ceil(xi/100 * n)` items.
pub fn select_top_xi(scores: &[f64], xi_percent: f64) -> Vec<usize> {
    let n = scores.len();
    let k = ((xi_percent / 100.0) * n as f64).ceil() as usize;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut selected = idx[..k.min(n)].to_vec();
    selected.sort_unstable();
    selected
}

/// Dynamics-ensemble agent: shares only the source transitions whose value
/// under the predicted target dynamics is close to the observed one, and
/// trains an extra optimistic exploration policy for target-domain rollouts.
#[derive(Debug, Clone)]
pub struct VgdfAgent {
    pub sac: SacCore,
    pub dynamics: Vec<Mlp>,
    opt_dyn: Vec<Adam>,
    pub explore: GaussianPolicy,
    opt_explore: Adam,
    pub cfg: VgdfConfig,
    pub dyn_train_steps: u64,
}

impl VgdfAgent {
    pub fn new(state_dim: usize, action_dim: usize, sac_cfg: SacConfig, cfg: VgdfConfig, rng: &mut StreamRng) -> Self {
        let lr = sac_cfg.lr;
        let sac = SacCore::new(state_dim, action_dim, sac_cfg, rng);
        let dynamics: Vec<Mlp> = (0..cfg.ensemble_size)
            .map(|_| Mlp::new(MlpLayout::new(state_dim + action_dim, &cfg.dynamics_hidden, 2 * state_dim), rng))
            .collect();
        let opt_dyn = dynamics.iter().map(|m| Adam::new(1e-3, m.params.len())).collect();
        let explore = GaussianPolicy::new(state_dim, action_dim, &cfg.explore_hidden, rng);
        let opt_explore = Adam::new(lr, explore.net.params.len());
        VgdfAgent { sac, dynamics, opt_dyn, explore, opt_explore, cfg, dyn_train_steps: 0 }
    }

    /// One max-likelihood step of every ensemble member on the target batch.
    /// Members are independent, so their gradients are computed in parallel
    /// and applied in index order.
    pub fn train_dynamics(&mut self, tar: &BatchArrays) -> Result<f64, AgentError> {
        let x = stack_state_action(&tar.states, &tar.actions);
        let grads: Vec<(f64, Vec<f64>)> = par::par_map(&self.dynamics, |model| {
            dynamics_nll_grad(model, &x, &tar.next_states)
        });
        let mut total = 0.0;
        for ((model, opt), (loss, grad)) in self
            .dynamics
            .iter_mut()
            .zip(&mut self.opt_dyn)
            .zip(&grads)
        {
            if !loss.is_finite() {
                return Err(AgentError::NonFiniteLoss(*loss));
            }
            opt.step(&mut model.params.0, grad)?;
            total += loss;
        }
        self.dyn_train_steps += 1;
        Ok(total / self.dynamics.len() as f64)
    }

    /// Predicted next-state mean of one ensemble member.
    fn predict_mean(&self, model: &Mlp, x: &Array2<f64>) -> Array2<f64> {
        let ds = self.sac.policy.net.layout.input_dim();
        let out = model.forward_eval(x);
        out.slice(ndarray::s![.., ..ds]).to_owned()
    }

    /// Fictitious-value-proximity scores (log-density scale) for each source
    /// sample: the likelihood of the observed next-state value under the
    /// Gaussian fitted to the ensemble's predicted next-state values.
    pub fn fvp_scores(&self, src: &BatchArrays, rng: &mut StreamRng) -> Result<Vec<f64>, AgentError> {
        if self.dyn_train_steps == 0 {
            return Err(AgentError::EnsembleUntrained);
        }
        let n = src.len();
        let x = stack_state_action(&src.states, &src.actions);
        let mut member_values: Vec<Array1<f64>> = Vec::with_capacity(self.dynamics.len());
        for model in &self.dynamics {
            let pred = self.predict_mean(model, &x);
            let (actions, _) = self.sac.policy.sample_batch_eval(&pred, false, rng);
            member_values.push(self.sac.critics.min_online_eval(&pred, &actions));
        }
        let (actual_actions, _) = self.sac.policy.sample_batch_eval(&src.next_states, false, rng);
        let actual = self.sac.critics.min_online_eval(&src.next_states, &actual_actions);

        let m = self.dynamics.len() as f64;
        let mut scores = Vec::with_capacity(n);
        for i in 0..n {
            let mean = member_values.iter().map(|v| v[i]).sum::<f64>() / m;
            let var = member_values
                .iter()
                .map(|v| (v[i] - mean) * (v[i] - mean))
                .sum::<f64>()
                / m;
            let var = var.max(FVP_VAR_FLOOR);
            let z = (actual[i] - mean) / var.sqrt();
            scores.push(-0.5 * z * z - 0.5 * var.ln());
        }
        Ok(scores)
    }

    /// Full update: ensemble step on target data, source filtering by value
    /// proximity, twin-critic TD on target plus selected source samples,
    /// SAC actor, optimistic exploration-policy step, polyak.
    pub fn update(
        &mut self,
        batch: &DualBatchArrays,
        bc: Option<(Domain, f64)>,
        rng: &mut StreamRng,
    ) -> Result<UpdateStats, AgentError> {
        let aux_loss = self.train_dynamics(&batch.tar)?;
        let scores = self.fvp_scores(&batch.src, rng)?;
        let selected = select_top_xi(&scores, self.cfg.xi_percent);
        let mut mask = Array1::zeros(batch.src.len());
        for &i in &selected {
            mask[i] = 1.0;
        }

        let terms = [
            TdTerm {
                batch: &batch.src,
                rewards: None,
                weights: Some(&mask),
                coeff: 1.0 / batch.src.len() as f64,
            },
            TdTerm::plain(&batch.tar, 1.0 / batch.tar.len() as f64),
        ];
        let targets = [
            self.sac.td_targets(&terms[0], rng),
            self.sac.td_targets(&terms[1], rng),
        ];
        let critic_loss = critic_step(
            &mut self.sac.critics,
            &mut self.sac.opt_q1,
            &mut self.sac.opt_q2,
            &terms,
            &targets,
            NO_EXTRA,
        )?;

        let bc_attachment = bc.map(|(domain, nu)| BcAttachment {
            batch_index: if domain == Domain::Source { 0 } else { 1 },
            data_actions: if domain == Domain::Source {
                &batch.src.actions
            } else {
                &batch.tar.actions
            },
            nu,
        });
        let actor_loss = actor_step(
            &mut self.sac.policy,
            &mut self.sac.opt_actor,
            &self.sac.critics,
            &[&batch.src.states, &batch.tar.states],
            self.sac.cfg.alpha,
            bc_attachment,
            rng,
        )?;

        self.explore_step(&batch.tar, rng)?;
        self.sac.critics.polyak(self.sac.cfg.polyak);
        self.sac.updates += 1;
        Ok(UpdateStats { critic_loss, actor_loss, aux_loss })
    }

    /// Exploration policy ascends an optimistic value estimate
    /// `mean_i Q_i + std_i Q_i` over the twin critics, with the usual entropy
    /// bonus. Used only to pick target-domain actions during training.
    fn explore_step(&mut self, tar: &BatchArrays, rng: &mut StreamRng) -> Result<f64, AgentError> {
        let mut tape = Tape::new();
        let gq1 = tape.register(&self.sac.critics.q1.0, false);
        let gq2 = tape.register(&self.sac.critics.q2.0, false);
        let eps = GaussianPolicy::draw_eps(tar.len(), self.explore.action_dim, rng);
        let sample = self.explore.rsample_tape(&mut tape, &tar.states, &eps, true);
        let s_const = tape.input(tar.states.clone());
        let x = tape.concat(s_const, sample.action);
        let q1 = self.sac.critics.layout.forward_tape(&mut tape, gq1, x);
        let q2 = self.sac.critics.layout.forward_tape(&mut tape, gq2, x);
        let qsum = tape.add(q1, q2);
        let mean = tape.mul_scalar(qsum, 0.5);
        let qdiff = tape.sub(q1, q2);
        let absdiff = tape.abs(qdiff);
        let std = tape.mul_scalar(absdiff, 0.5);
        let optimistic = tape.add(mean, std);
        let ent = tape.mul_scalar(sample.log_prob, self.sac.cfg.alpha);
        let qterm = tape.sub(optimistic, ent);
        let total = tape.sum_all(qterm);
        let loss = tape.mul_scalar(total, -1.0 / tar.len() as f64);
        let loss_val = tape.scalar(loss);
        if !loss_val.is_finite() {
            return Err(AgentError::NonFiniteLoss(loss_val));
        }
        tape.backward(loss);
        let grads = tape.group_grad(sample.group).to_vec();
        self.opt_explore.step(&mut self.explore.net.params.0, &grads)?;
        Ok(loss_val)
    }
}

fn dynamics_nll_grad(model: &Mlp, x: &Array2<f64>, next_states: &Array2<f64>) -> (f64, Vec<f64>) {
    let ds = next_states.ncols();
    let mut tape = Tape::new();
    let g = tape.register(&model.params.0, true);
    let xin = tape.input(x.clone());
    let out = model.layout.forward_tape(&mut tape, g, xin);
    let mean = tape.slice_cols(out, 0, ds);
    let raw_lv = tape.slice_cols(out, ds, 2 * ds);
    let logvar = tape.clamp(raw_lv, DYN_LOGVAR_RANGE.0, DYN_LOGVAR_RANGE.1);
    let target = tape.input(next_states.clone());
    let diff = tape.sub(target, mean);
    let sq = tape.square(diff);
    let neg_lv = tape.neg(logvar);
    let inv_var = tape.exp(neg_lv);
    let quad = tape.mul(sq, inv_var);
    let q_half = tape.mul_scalar(quad, 0.5);
    let lv_half = tape.mul_scalar(logvar, 0.5);
    let terms = tape.add(q_half, lv_half);
    let rows = tape.sum_cols(terms);
    let loss = tape.mean_all(rows);
    let loss_val = tape.scalar(loss);
    tape.backward(loss);
    (loss_val, tape.group_grad(g).to_vec())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParConfig {
    pub rep_dim: usize,
    pub encoder_hidden: Vec<usize>,
    /// Reward penalty coefficient.
    pub beta: f64,
}

impl Default for ParConfig {
    fn default() -> Self {
        ParConfig { rep_dim: 256, encoder_hidden: vec![256, 256], beta: 0.1 }
    }
}

impl ParConfig {
    pub fn desk() -> Self {
        ParConfig { rep_dim: 16, encoder_hidden: vec![32, 32], beta: 0.1 }
    }
}

/// Representation-mismatch agent: encoders trained on target transitions
/// only; source rewards are penalized by the squared prediction deviation.
#[derive(Debug, Clone)]
pub struct ParAgent {
    pub sac: SacCore,
    pub state_encoder: Mlp,
    pub sa_encoder: Mlp,
    opt_f: Adam,
    opt_g: Adam,
    pub cfg: ParConfig,
}

impl ParAgent {
    pub fn new(state_dim: usize, action_dim: usize, sac_cfg: SacConfig, cfg: ParConfig, rng: &mut StreamRng) -> Self {
        let lr = sac_cfg.lr;
        let sac = SacCore::new(state_dim, action_dim, sac_cfg, rng);
        let state_encoder = Mlp::new(MlpLayout::new(state_dim, &cfg.encoder_hidden, cfg.rep_dim), rng);
        let sa_encoder = Mlp::new(
            MlpLayout::new(cfg.rep_dim + action_dim, &cfg.encoder_hidden, cfg.rep_dim),
            rng,
        );
        let opt_f = Adam::new(lr, state_encoder.params.len());
        let opt_g = Adam::new(lr, sa_encoder.params.len());
        ParAgent { sac, state_encoder, sa_encoder, opt_f, opt_g, cfg }
    }

    /// Encoder step on target transitions: `(g(f(s), a) - SG(f(s')))^2`.
    pub fn encoder_step(&mut self, tar: &BatchArrays) -> Result<f64, AgentError> {
        let mut tape = Tape::new();
        let gf = tape.register(&self.state_encoder.params.0, true);
        let s_in = tape.input(tar.states.clone());
        let f_s = self.state_encoder.layout.forward_tape(&mut tape, gf, s_in);
        let a_in = tape.input(tar.actions.clone());
        let x = tape.concat(f_s, a_in);
        let gg = tape.register(&self.sa_encoder.params.0, true);
        let pred = self.sa_encoder.layout.forward_tape(&mut tape, gg, x);
        // Stop-gradient on the next-state representation.
        let f_next = tape.input(self.state_encoder.forward_eval(&tar.next_states));
        let diff = tape.sub(pred, f_next);
        let sq = tape.square(diff);
        let rows = tape.sum_cols(sq);
        let loss = tape.mean_all(rows);
        let loss_val = tape.scalar(loss);
        if !loss_val.is_finite() {
            return Err(AgentError::NonFiniteLoss(loss_val));
        }
        tape.backward(loss);
        let grad_f = tape.group_grad(gf).to_vec();
        let grad_g = tape.group_grad(gg).to_vec();
        self.opt_f.step(&mut self.state_encoder.params.0, &grad_f)?;
        self.opt_g.step(&mut self.sa_encoder.params.0, &grad_g)?;
        Ok(loss_val)
    }

    /// Squared representation deviation per sample (no gradients).
    pub fn penalty(&self, batch: &BatchArrays) -> Array1<f64> {
        let f_s = self.state_encoder.forward_eval(&batch.states);
        let x = stack_state_action(&f_s, &batch.actions);
        let pred = self.sa_encoder.forward_eval(&x);
        let f_next = self.state_encoder.forward_eval(&batch.next_states);
        Array1::from_iter((0..batch.len()).map(|r| {
            (0..self.cfg.rep_dim)
                .map(|c| {
                    let d = pred[[r, c]] - f_next[[r, c]];
                    d * d
                })
                .sum::<f64>()
        }))
    }

    pub fn update(
        &mut self,
        batch: &DualBatchArrays,
        bc: Option<(Domain, f64)>,
        rng: &mut StreamRng,
    ) -> Result<UpdateStats, AgentError> {
        let aux_loss = self.encoder_step(&batch.tar)?;
        let penalty = self.penalty(&batch.src);
        let relabeled = Array1::from_iter(
            batch
                .src
                .rewards
                .iter()
                .zip(penalty.iter())
                .map(|(r, p)| r - self.cfg.beta * p),
        );
        let mut stats = match bc {
            None => self.sac.update_weighted(batch, Some(&relabeled), None, rng)?,
            Some((domain, nu)) => {
                // Same structure as the weighted SAC update, with a BC term
                // attached to the stated domain.
                let n = batch.total() as f64;
                let terms = [
                    TdTerm {
                        batch: &batch.src,
                        rewards: Some(&relabeled),
                        weights: None,
                        coeff: 1.0 / n,
                    },
                    TdTerm::plain(&batch.tar, 1.0 / n),
                ];
                let targets = [
                    self.sac.td_targets(&terms[0], rng),
                    self.sac.td_targets(&terms[1], rng),
                ];
                let critic_loss = critic_step(
                    &mut self.sac.critics,
                    &mut self.sac.opt_q1,
                    &mut self.sac.opt_q2,
                    &terms,
                    &targets,
                    NO_EXTRA,
                )?;
                let bc_attachment = BcAttachment {
                    batch_index: if domain == Domain::Source { 0 } else { 1 },
                    data_actions: if domain == Domain::Source {
                        &batch.src.actions
                    } else {
                        &batch.tar.actions
                    },
                    nu,
                };
                let actor_loss = actor_step(
                    &mut self.sac.policy,
                    &mut self.sac.opt_actor,
                    &self.sac.critics,
                    &[&batch.src.states, &batch.tar.states],
                    self.sac.cfg.alpha,
                    Some(bc_attachment),
                    rng,
                )?;
                self.sac.critics.polyak(self.sac.cfg.polyak);
                self.sac.updates += 1;
                UpdateStats { critic_loss, actor_loss, aux_loss: 0.0 }
            }
        };
        stats.aux_loss = aux_loss;
        Ok(stats)
    }
}

pub use crate::sac::col as column;
