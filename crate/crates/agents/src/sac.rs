//! Soft actor-critic core shared by every agent family, plus the composable
//! critic/actor loss builders the variants plug into.
//!
//! Loss structure is deliberately rigid so that algebraic reductions hold
//! bit-for-bit: per-domain residual sums are combined in a fixed order with
//! explicit coefficients, per-sample weights multiply residuals directly
//! (weight 1 is exact), and reward relabeling swaps the reward vector before
//! the shared path runs.

use crate::batch::{BatchArrays, DualBatchArrays};
use crate::error::AgentError;
use ndarray::{Array1, Array2};
use offdyn_core::StreamRng;
use offdyn_nn::critic::stack_state_action;
use offdyn_nn::{Adam, Checkpoint, GaussianPolicy, GroupId, MlpLayout, Tape, TwinCritics, Var};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SacConfig {
    pub gamma: f64,
    pub alpha: f64,
    pub lr: f64,
    pub polyak: f64,
    pub warmup_steps: u32,
    pub buffer_capacity: usize,
    pub batch_src: usize,
    pub batch_tar: usize,
    pub actor_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
}

impl Default for SacConfig {
    fn default() -> Self {
        SacConfig {
            gamma: 0.99,
            alpha: 0.2,
            lr: 3e-4,
            polyak: 5e-3,
            warmup_steps: 256,
            buffer_capacity: 1_000_000,
            batch_src: 128,
            batch_tar: 128,
            actor_hidden: vec![256, 256],
            critic_hidden: vec![256, 256],
        }
    }
}

impl SacConfig {
    /// Desk-scale preset: small networks sized for the CPU-only environments.
    pub fn desk() -> Self {
        SacConfig {
            actor_hidden: vec![32, 32],
            critic_hidden: vec![32, 32],
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct UpdateStats {
    pub critic_loss: f64,
    pub actor_loss: f64,
    pub aux_loss: f64,
}

/// One domain's contribution to the critic TD loss.
pub struct TdTerm<'a> {
    pub batch: &'a BatchArrays,
    /// Replacement rewards; `None` uses the batch rewards unchanged.
    pub rewards: Option<&'a Array1<f64>>,
    /// Per-sample multiplier on the squared residual (importance weights or
    /// selection masks).
    pub weights: Option<&'a Array1<f64>>,
    /// Coefficient applied to this batch's residual sum in the total loss.
    pub coeff: f64,
}

impl<'a> TdTerm<'a> {
    pub fn plain(batch: &'a BatchArrays, coeff: f64) -> Self {
        TdTerm { batch, rewards: None, weights: None, coeff }
    }
}

#[derive(Debug, Clone)]
pub struct SacCore {
    pub policy: GaussianPolicy,
    pub critics: TwinCritics,
    pub opt_actor: Adam,
    pub opt_q1: Adam,
    pub opt_q2: Adam,
    pub cfg: SacConfig,
    pub updates: u64,
}

impl SacCore {
    pub fn new(state_dim: usize, action_dim: usize, cfg: SacConfig, rng: &mut StreamRng) -> Self {
        let policy = GaussianPolicy::new(state_dim, action_dim, &cfg.actor_hidden, rng);
        let critics = TwinCritics::new(state_dim, action_dim, &cfg.critic_hidden, false, rng);
        let opt_actor = Adam::new(cfg.lr, policy.net.params.len());
        let opt_q1 = Adam::new(cfg.lr, critics.q1.len());
        let opt_q2 = Adam::new(cfg.lr, critics.q2.len());
        SacCore { policy, critics, opt_actor, opt_q1, opt_q2, cfg, updates: 0 }
    }

    /// TD target `y = r + gamma (1 - done) (min_i targetQ_i(s', a') - alpha log pi)`
    /// with `a' ~ pi(.|s')`. Consumes policy noise for the whole batch.
    pub fn td_targets(&self, term: &TdTerm, rng: &mut StreamRng) -> Array1<f64> {
        let (next_actions, logp) = self
            .policy
            .sample_batch_eval(&term.batch.next_states, false, rng);
        let q = self
            .critics
            .min_target_eval(&term.batch.next_states, &next_actions);
        let rewards = term.rewards.unwrap_or(&term.batch.rewards);
        Array1::from_iter((0..term.batch.len()).map(|i| {
            rewards[i]
                + self.cfg.gamma * (1.0 - term.batch.done[i]) * (q[i] - self.cfg.alpha * logp[i])
        }))
    }

    /// The plain SAC update over a dual batch: combined-mean TD loss on both
    /// domains, entropy-regularized actor on both domains, polyak targets.
    pub fn update(&mut self, batch: &DualBatchArrays, rng: &mut StreamRng) -> Result<UpdateStats, AgentError> {
        self.update_weighted(batch, None, None, rng)
    }

    /// SAC with optional source-side reward replacement and per-sample TD
    /// weights. `rewards/weights = None` reduces exactly to plain SAC.
    pub fn update_weighted(
        &mut self,
        batch: &DualBatchArrays,
        src_rewards: Option<&Array1<f64>>,
        src_weights: Option<&Array1<f64>>,
        rng: &mut StreamRng,
    ) -> Result<UpdateStats, AgentError> {
        let n = batch.total() as f64;
        let terms = [
            TdTerm {
                batch: &batch.src,
                rewards: src_rewards,
                weights: src_weights,
                coeff: 1.0 / n,
            },
            TdTerm::plain(&batch.tar, 1.0 / n),
        ];
        let targets = [
            self.td_targets(&terms[0], rng),
            self.td_targets(&terms[1], rng),
        ];
        let critic_loss = critic_step(
            &mut self.critics,
            &mut self.opt_q1,
            &mut self.opt_q2,
            &terms,
            &targets,
            NO_EXTRA,
        )?;
        let actor_loss = actor_step(
            &mut self.policy,
            &mut self.opt_actor,
            &self.critics,
            &[&batch.src.states, &batch.tar.states],
            self.cfg.alpha,
            None,
            rng,
        )?;
        self.critics.polyak(self.cfg.polyak);
        self.updates += 1;
        Ok(UpdateStats { critic_loss, actor_loss, aux_loss: 0.0 })
    }

    /// Single-domain SAC update (used by the source-then-finetune baseline,
    /// which trains each phase on one domain with a larger batch).
    pub fn update_single(&mut self, batch: &BatchArrays, rng: &mut StreamRng) -> Result<UpdateStats, AgentError> {
        let term = TdTerm::plain(batch, 1.0 / batch.len() as f64);
        let targets = [self.td_targets(&term, rng)];
        let critic_loss = critic_step(
            &mut self.critics,
            &mut self.opt_q1,
            &mut self.opt_q2,
            &[term],
            &targets,
            NO_EXTRA,
        )?;
        let actor_loss = actor_step(
            &mut self.policy,
            &mut self.opt_actor,
            &self.critics,
            &[&batch.states],
            self.cfg.alpha,
            None,
            rng,
        )?;
        self.critics.polyak(self.cfg.polyak);
        self.updates += 1;
        Ok(UpdateStats { critic_loss, actor_loss, aux_loss: 0.0 })
    }

    pub fn checkpoint_into(&self, ck: &mut Checkpoint, prefix: &str) {
        ck.push(&format!("{prefix}actor"), &self.policy.net.params.0);
        ck.push(&format!("{prefix}q1"), &self.critics.q1.0);
        ck.push(&format!("{prefix}q2"), &self.critics.q2.0);
        ck.push(&format!("{prefix}target1"), &self.critics.target1.0);
        ck.push(&format!("{prefix}target2"), &self.critics.target2.0);
        for (name, opt) in [
            ("opt_actor", &self.opt_actor),
            ("opt_q1", &self.opt_q1),
            ("opt_q2", &self.opt_q2),
        ] {
            let (m, v, t) = opt.state();
            ck.push(&format!("{prefix}{name}.m"), m);
            ck.push(&format!("{prefix}{name}.v"), v);
            ck.push(&format!("{prefix}{name}.t"), &[t as f64]);
        }
    }

    pub fn restore_from(&mut self, ck: &Checkpoint, prefix: &str) -> Result<(), AgentError> {
        ck.take_into(&format!("{prefix}actor"), &mut self.policy.net.params.0)?;
        ck.take_into(&format!("{prefix}q1"), &mut self.critics.q1.0)?;
        ck.take_into(&format!("{prefix}q2"), &mut self.critics.q2.0)?;
        ck.take_into(&format!("{prefix}target1"), &mut self.critics.target1.0)?;
        ck.take_into(&format!("{prefix}target2"), &mut self.critics.target2.0)?;
        for (name, opt) in [
            ("opt_actor", &mut self.opt_actor),
            ("opt_q1", &mut self.opt_q1),
            ("opt_q2", &mut self.opt_q2),
        ] {
            let m = ck
                .get(&format!("{prefix}{name}.m"))
                .ok_or_else(|| AgentError::UnknownAlgorithm(format!("missing {name}.m")))?
                .to_vec();
            let v = ck
                .get(&format!("{prefix}{name}.v"))
                .ok_or_else(|| AgentError::UnknownAlgorithm(format!("missing {name}.v")))?
                .to_vec();
            let t = ck
                .get(&format!("{prefix}{name}.t"))
                .ok_or_else(|| AgentError::UnknownAlgorithm(format!("missing {name}.t")))?[0]
                as u64;
            opt.restore(&m, &v, t).map_err(AgentError::Nn)?;
        }
        Ok(())
    }
}

/// Marker closure for "no extra critic terms".
pub const NO_EXTRA: fn(&mut Tape, GroupId, GroupId, &MlpLayout) -> Result<Vec<Var>, AgentError> =
    |_, _, _, _| Ok(Vec::new());

/// Shared critic step. Builds, per critic i and per TD term k,
/// `S_ik = sum_rows w .* (Q_i - y_k)^2`, combines them as
/// `sum_k coeff_k (S_1k + S_2k)`, adds any extra scalar terms from the
/// closure, and takes one Adam step per critic.
pub fn critic_step(
    critics: &mut TwinCritics,
    opt_q1: &mut Adam,
    opt_q2: &mut Adam,
    terms: &[TdTerm],
    targets: &[Array1<f64>],
    extra: impl FnOnce(&mut Tape, GroupId, GroupId, &MlpLayout) -> Result<Vec<Var>, AgentError>,
) -> Result<f64, AgentError> {
    assert_eq!(terms.len(), targets.len());
    let mut tape = Tape::new();
    let g1 = tape.register(&critics.q1.0, true);
    let g2 = tape.register(&critics.q2.0, true);

    let mut total: Option<Var> = None;
    for (term, y) in terms.iter().zip(targets) {
        let x = tape.input(stack_state_action(&term.batch.states, &term.batch.actions));
        let y_const = tape.input(col(y));
        let mut sums = [None, None];
        for (slot, g) in [(0, g1), (1, g2)] {
            let q = critics.layout.forward_tape(&mut tape, g, x);
            let resid = tape.sub(q, y_const);
            let mut sq = tape.square(resid);
            if let Some(w) = term.weights {
                let wv = tape.input(col(w));
                sq = tape.mul(sq, wv);
            }
            sums[slot] = Some(tape.sum_all(sq));
        }
        let pair = tape.add(sums[0].unwrap(), sums[1].unwrap());
        let scaled = tape.mul_scalar(pair, term.coeff);
        total = Some(match total {
            Some(acc) => tape.add(acc, scaled),
            None => scaled,
        });
    }
    let mut loss = total.expect("at least one TD term");
    for extra_term in extra(&mut tape, g1, g2, &critics.layout)? {
        loss = tape.add(loss, extra_term);
    }

    let loss_val = tape.scalar(loss);
    if !loss_val.is_finite() {
        return Err(AgentError::NonFiniteLoss(loss_val));
    }
    tape.backward(loss);
    let grad1 = tape.group_grad(g1).to_vec();
    let grad2 = tape.group_grad(g2).to_vec();
    opt_q1.step(&mut critics.q1.0, &grad1)?;
    opt_q2.step(&mut critics.q2.0, &grad2)?;
    Ok(loss_val)
}

/// Behavior-cloning attachment for [`actor_step`]: squared action-matching
/// on the states of `batch_index`, with the Q term scaled by
/// `lambda = nu / max(mean |min_i Q_i|, 1e-3)`.
pub struct BcAttachment<'a> {
    pub batch_index: usize,
    pub data_actions: &'a Array2<f64>,
    pub nu: f64,
}

pub const Q_MEAN_FLOOR: f64 = 1e-3;

/// Shared actor step over one or more state batches (role order fixed by the
/// caller): maximizes `min_i Q_i(s, a_pi) - alpha log pi` with combined-mean
/// normalization, optionally adding a BC term.
pub fn actor_step(
    policy: &mut GaussianPolicy,
    opt: &mut Adam,
    critics: &TwinCritics,
    state_batches: &[&Array2<f64>],
    alpha: f64,
    bc: Option<BcAttachment>,
    rng: &mut StreamRng,
) -> Result<f64, AgentError> {
    let n_total: usize = state_batches.iter().map(|s| s.nrows()).sum();
    let mut tape = Tape::new();
    let gq1 = tape.register(&critics.q1.0, false);
    let gq2 = tape.register(&critics.q2.0, false);

    let mut policy_groups = Vec::new();
    let mut actions = Vec::new();
    let mut minqs = Vec::new();
    let mut acc: Option<Var> = None;
    for states in state_batches {
        let eps = GaussianPolicy::draw_eps(states.nrows(), policy.action_dim, rng);
        let sample = policy.rsample_tape(&mut tape, states, &eps, true);
        policy_groups.push(sample.group);
        let s_const = tape.input((*states).clone());
        let x = tape.concat(s_const, sample.action);
        let q1 = critics.layout.forward_tape(&mut tape, gq1, x);
        let q2 = critics.layout.forward_tape(&mut tape, gq2, x);
        let minq = tape.min2(q1, q2);
        minqs.push(minq);
        actions.push(sample.action);
        let ent = tape.mul_scalar(sample.log_prob, alpha);
        let qterm = tape.sub(minq, ent);
        let sum = tape.sum_all(qterm);
        acc = Some(match acc {
            Some(a) => tape.add(a, sum),
            None => sum,
        });
    }

    // lambda is computed from detached Q values (it normalizes the scale of
    // the Q term, it is not a gradient path).
    let lambda = match &bc {
        Some(spec) => {
            let mut abs_sum = 0.0;
            for minq in &minqs {
                abs_sum += tape.value(*minq).iter().map(|v| v.abs()).sum::<f64>();
            }
            let mean_abs = abs_sum / n_total as f64;
            spec.nu / mean_abs.max(Q_MEAN_FLOOR)
        }
        None => 1.0,
    };

    let mut loss = tape.mul_scalar(acc.expect("at least one batch"), -lambda / n_total as f64);
    if let Some(spec) = &bc {
        let a_pi = actions[spec.batch_index];
        let data = tape.input(spec.data_actions.clone());
        let diff = tape.sub(data, a_pi);
        let sq = tape.square(diff);
        let bc_mean = tape.mean_all(sq);
        loss = tape.add(loss, bc_mean);
    }

    let loss_val = tape.scalar(loss);
    if !loss_val.is_finite() {
        return Err(AgentError::NonFiniteLoss(loss_val));
    }
    tape.backward(loss);
    let mut grads = vec![0.0; policy.net.params.len()];
    for g in policy_groups {
        for (acc, v) in grads.iter_mut().zip(tape.group_grad(g)) {
            *acc += v;
        }
    }
    opt.step(&mut policy.net.params.0, &grads)?;
    Ok(loss_val)
}

/// Column vector from an `Array1`.
pub fn col(v: &Array1<f64>) -> Array2<f64> {
    Array2::from_shape_vec((v.len(), 1), v.to_vec()).expect("column")
}


#[cfg(test)]
mod tests {
    use super::tests_support::toy_dual;
    use super::*;
    use offdyn_core::stream_rng;

    fn desk_core(seed: u64) -> SacCore {
        let mut cfg = SacConfig::desk();
        cfg.actor_hidden = vec![8, 8];
        cfg.critic_hidden = vec![8, 8];
        SacCore::new(3, 2, cfg, &mut stream_rng(seed, "init"))
    }

    #[test]
    fn zero_gamma_targets_equal_rewards() {
        let mut core = desk_core(1);
        core.cfg.gamma = 0.0;
        let batch = toy_dual(2, 16);
        let ones = Array1::from_elem(16, 1.0);
        let term = TdTerm { batch: &batch.src, rewards: Some(&ones), weights: None, coeff: 1.0 };
        let mut rng = stream_rng(3, "t");
        let y = core.td_targets(&term, &mut rng);
        assert!(y.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn unit_weights_and_zero_relabel_are_exact_identities() {
        // SAC_IW with omega = 1 and DARC with dr = 0 must produce
        // bit-identical losses and parameters to plain SAC.
        let batch = toy_dual(5, 12);
        let ones = Array1::from_elem(12, 1.0);
        let relabeled = batch.src.rewards.clone(); // r - 0 = r

        let mut plain = desk_core(7);
        let mut weighted = plain.clone();
        let mut rng_a = stream_rng(11, "upd");
        let mut rng_b = stream_rng(11, "upd");
        let sa = plain.update(&batch, &mut rng_a).unwrap();
        let sb = weighted
            .update_weighted(&batch, Some(&relabeled), Some(&ones), &mut rng_b)
            .unwrap();
        assert_eq!(sa.critic_loss.to_bits(), sb.critic_loss.to_bits());
        assert_eq!(sa.actor_loss.to_bits(), sb.actor_loss.to_bits());
        assert_eq!(plain.policy.net.params, weighted.policy.net.params);
        assert_eq!(plain.critics.q1, weighted.critics.q1);
        assert_eq!(plain.critics.target2, weighted.critics.target2);
    }

    #[test]
    fn tiny_weights_scale_the_source_contribution() {
        // With omega = 1e-4 on every source sample the critic loss must equal
        // the hand-assembled value: (1e-4 * S_src + S_tar) / N summed over
        // both critics.
        let batch = toy_dual(9, 8);
        let w = Array1::from_elem(8, 1e-4);
        let mut core = desk_core(13);
        let mut rng = stream_rng(17, "upd");

        // Recompute the pieces with frozen targets.
        let n = batch.total() as f64;
        let terms = [
            TdTerm { batch: &batch.src, rewards: None, weights: Some(&w), coeff: 1.0 / n },
            TdTerm::plain(&batch.tar, 1.0 / n),
        ];
        let mut rng_clone = rng.clone();
        let y_src = core.td_targets(&terms[0], &mut rng_clone);
        let y_tar = core.td_targets(&terms[1], &mut rng_clone);

        let q1s = core.critics.q_eval(&core.critics.q1, &batch.src.states, &batch.src.actions);
        let q2s = core.critics.q_eval(&core.critics.q2, &batch.src.states, &batch.src.actions);
        let q1t = core.critics.q_eval(&core.critics.q1, &batch.tar.states, &batch.tar.actions);
        let q2t = core.critics.q_eval(&core.critics.q2, &batch.tar.states, &batch.tar.actions);
        let sum_sq = |q: &Array1<f64>, y: &Array1<f64>, w: Option<&Array1<f64>>| -> f64 {
            q.iter()
                .zip(y)
                .enumerate()
                .map(|(i, (qv, yv))| {
                    let r = (qv - yv) * (qv - yv);
                    r * w.map_or(1.0, |w| w[i])
                })
                .sum()
        };
        let expected = ((sum_sq(&q1s, &y_src, Some(&w)) + sum_sq(&q2s, &y_src, Some(&w))) / n)
            + ((sum_sq(&q1t, &y_tar, None) + sum_sq(&q2t, &y_tar, None)) / n);

        let stats = core.update_weighted(&batch, None, Some(&w), &mut rng).unwrap();
        assert!(
            (stats.critic_loss - expected).abs() < 1e-9,
            "{} vs {expected}",
            stats.critic_loss
        );
    }

    #[test]
    fn checkpoint_round_trip_restores_bit_exact() {
        let mut core = desk_core(21);
        let batch = toy_dual(22, 8);
        let mut rng = stream_rng(23, "upd");
        for _ in 0..3 {
            core.update(&batch, &mut rng).unwrap();
        }
        let mut ck = Checkpoint::new(3);
        core.checkpoint_into(&mut ck, "sac.");
        let mut other = desk_core(99);
        other.restore_from(&ck, "sac.").unwrap();
        assert_eq!(core.policy.net.params, other.policy.net.params);
        assert_eq!(core.critics.q1, other.critics.q1);
        assert_eq!(core.critics.target1, other.critics.target1);
        // Continued training stays aligned.
        let mut r1 = stream_rng(31, "cont");
        let mut r2 = stream_rng(31, "cont");
        let a = core.update(&batch, &mut r1).unwrap();
        let b = other.update(&batch, &mut r2).unwrap();
        assert_eq!(a.critic_loss.to_bits(), b.critic_loss.to_bits());
        assert_eq!(core.policy.net.params, other.policy.net.params);
    }
}
