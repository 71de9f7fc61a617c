//! Hybrid (one domain online, one offline) algorithms: the three
//! parameterized regularizers attached to a domain role, the
//! classifier-weighted hybrid in both directions, and the critic-ensemble
//! agent.
//!
//! Naming follows "objective on source _ objective on target": `BC_SAC`
//! regularizes the source domain, `SAC_BC` the target domain. Internally the
//! update only sees a (regularized, plain) batch pair, so swapping the
//! domain labels and the role assignment yields bit-identical losses.

use crate::batch::{BatchArrays, DualBatchArrays};
use crate::classifiers::DomainClassifierPair;
use crate::error::AgentError;
use crate::online::{ParAgent, ParConfig, VgdfAgent, VgdfConfig};
use crate::sac::{actor_step, col, critic_step, BcAttachment, SacConfig, SacCore, TdTerm, UpdateStats};
use ndarray::{Array1, Array2};
use offdyn_core::{Domain, StreamRng};
use offdyn_nn::critic::stack_state_action;
use offdyn_nn::{Adam, CriticEnsemble, Cvae, CvaeSpec, GaussianPolicy, GroupId, MlpLayout, Tape, Var};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegKind {
    Bc,
    Cql,
    Mcq,
}

/// Which regularizer is attached to which domain, with its coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularizerSpec {
    pub kind: RegKind,
    pub applied_domain: Domain,
    /// BC normalization coefficient.
    pub nu: f64,
    /// Conservative penalty coefficient.
    pub beta_cql: f64,
    /// In-distribution weighting for the pseudo-target objective.
    pub lambda_mcq: f64,
    /// Number of behavior-model action samples per state.
    pub n_mcq: usize,
}

impl RegularizerSpec {
    pub fn new(kind: RegKind, applied_domain: Domain) -> Self {
        RegularizerSpec {
            kind,
            applied_domain,
            nu: 5.0,
            beta_cql: 10.0,
            lambda_mcq: 0.8,
            n_mcq: 10,
        }
    }
}

/// The nine named hybrid compositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HybridAlgo {
    BcSac,
    CqlSac,
    McqSac,
    SacBc,
    SacCql,
    SacMcq,
    BcVgdf,
    BcPar,
    ParBc,
}

/// Resolves an algorithm name to its composition: which objective applies to
/// which domain. Regularizers attach to the source for `X_SAC` names and to
/// the target for `SAC_X` names.
pub fn compose_hybrid(name: &str) -> Result<HybridAlgo, AgentError> {
    match name.to_ascii_uppercase().as_str() {
        "BC_SAC" => Ok(HybridAlgo::BcSac),
        "CQL_SAC" => Ok(HybridAlgo::CqlSac),
        "MCQ_SAC" => Ok(HybridAlgo::McqSac),
        "SAC_BC" => Ok(HybridAlgo::SacBc),
        "SAC_CQL" => Ok(HybridAlgo::SacCql),
        "SAC_MCQ" => Ok(HybridAlgo::SacMcq),
        "BC_VGDF" => Ok(HybridAlgo::BcVgdf),
        "BC_PAR" => Ok(HybridAlgo::BcPar),
        "PAR_BC" => Ok(HybridAlgo::ParBc),
        other => Err(AgentError::UnknownAlgorithm(other.to_owned())),
    }
}

impl HybridAlgo {
    pub fn regularizer(self) -> Option<RegularizerSpec> {
        match self {
            HybridAlgo::BcSac => Some(RegularizerSpec::new(RegKind::Bc, Domain::Source)),
            HybridAlgo::CqlSac => Some(RegularizerSpec::new(RegKind::Cql, Domain::Source)),
            HybridAlgo::McqSac => Some(RegularizerSpec::new(RegKind::Mcq, Domain::Source)),
            HybridAlgo::SacBc => Some(RegularizerSpec::new(RegKind::Bc, Domain::Target)),
            HybridAlgo::SacCql => Some(RegularizerSpec::new(RegKind::Cql, Domain::Target)),
            HybridAlgo::SacMcq => Some(RegularizerSpec::new(RegKind::Mcq, Domain::Target)),
            // VGDF/PAR composites attach a BC term on top of the base agent.
            HybridAlgo::BcVgdf | HybridAlgo::BcPar => {
                Some(RegularizerSpec::new(RegKind::Bc, Domain::Source))
            }
            HybridAlgo::ParBc => Some(RegularizerSpec::new(RegKind::Bc, Domain::Target)),
        }
    }
}

/// BC / CQL / MCQ attached to one domain of a SAC core.
#[derive(Debug, Clone)]
pub struct RegularizedSac {
    pub sac: SacCore,
    pub spec: RegularizerSpec,
    /// Behavior model for the pseudo-target objective (`Mcq` only).
    pub behavior: Option<Cvae>,
}

impl RegularizedSac {
    pub fn new(
        state_dim: usize,
        action_dim: usize,
        cfg: SacConfig,
        spec: RegularizerSpec,
        cvae_hidden: &[usize],
        rng: &mut StreamRng,
    ) -> Self {
        let sac = SacCore::new(state_dim, action_dim, cfg, rng);
        let behavior = (spec.kind == RegKind::Mcq).then(|| {
            Cvae::new(
                CvaeSpec::behavior(action_dim, state_dim).with_hidden(cvae_hidden),
                rng,
            )
        });
        RegularizedSac { sac, spec, behavior }
    }

    pub fn update(&mut self, batch: &DualBatchArrays, rng: &mut StreamRng) -> Result<UpdateStats, AgentError> {
        // Role split: the regularized batch first, the plain batch second.
        let (reg, plain) = match self.spec.applied_domain {
            Domain::Source => (&batch.src, &batch.tar),
            Domain::Target => (&batch.tar, &batch.src),
        };
        let mut aux_loss = 0.0;
        if let Some(cvae) = &mut self.behavior {
            aux_loss = cvae.train_step(&reg.actions, &reg.states, rng)?.loss;
        }

        let n = (reg.len() + plain.len()) as f64;
        let (coeff_reg, coeff_plain) = match self.spec.kind {
            // Combined-mean TD over both domains.
            RegKind::Bc | RegKind::Cql => (1.0 / n, 1.0 / n),
            // Per-domain means with the in-distribution weighting on the
            // regularized side.
            RegKind::Mcq => (
                self.spec.lambda_mcq / reg.len() as f64,
                1.0 / plain.len() as f64,
            ),
        };
        let terms = [TdTerm::plain(reg, coeff_reg), TdTerm::plain(plain, coeff_plain)];
        let targets = [
            self.sac.td_targets(&terms[0], rng),
            self.sac.td_targets(&terms[1], rng),
        ];

        // Pre-draw whatever the conservative terms need so the tape closure
        // stays free of RNG access.
        let extra_inputs = match self.spec.kind {
            RegKind::Cql => {
                let (policy_actions, _) = self.sac.policy.sample_batch_eval(&reg.states, false, rng);
                Some((policy_actions, None))
            }
            RegKind::Mcq => {
                let (policy_actions, _) = self.sac.policy.sample_batch_eval(&reg.states, false, rng);
                let behavior = self.behavior.as_ref().expect("mcq has a behavior model");
                let pseudo = mcq_pseudo_targets(&self.sac.critics, behavior, &reg.states, self.spec.n_mcq, rng)?;
                Some((policy_actions, Some(pseudo)))
            }
            RegKind::Bc => None,
        };

        let spec = &self.spec;
        let critics_snapshot = self.sac.critics.clone();
        let critic_loss = critic_step(
            &mut self.sac.critics,
            &mut self.sac.opt_q1,
            &mut self.sac.opt_q2,
            &terms,
            &targets,
            |tape, g1, g2, layout| {
                let mut extras = Vec::new();
                match (spec.kind, &extra_inputs) {
                    (RegKind::Cql, Some((policy_actions, _))) => {
                        // beta * (E[Q(s, a~pi)] - E[Q(s, a_data)]) on the
                        // regularized domain, for each critic.
                        let x_pi = tape.input(stack_state_action(&reg.states, policy_actions));
                        let x_data = tape.input(stack_state_action(&reg.states, &reg.actions));
                        for g in [g1, g2] {
                            let q_pi = layout.forward_tape(tape, g, x_pi);
                            let q_data = layout.forward_tape(tape, g, x_data);
                            let s_pi = tape.sum_all(q_pi);
                            let s_data = tape.sum_all(q_data);
                            let gap = tape.sub(s_pi, s_data);
                            let scaled = tape.mul_scalar(gap, spec.beta_cql / reg.len() as f64);
                            extras.push(scaled);
                        }
                    }
                    (RegKind::Mcq, Some((policy_actions, Some(pseudo)))) => {
                        // (1 - lambda) E[(Q(s, a~pi) - y')^2] on the
                        // regularized domain.
                        let x_pi = tape.input(stack_state_action(&reg.states, policy_actions));
                        let y = tape.input(col(pseudo));
                        for g in [g1, g2] {
                            let q_pi = layout.forward_tape(tape, g, x_pi);
                            let resid = tape.sub(q_pi, y);
                            let sq = tape.square(resid);
                            let sum = tape.sum_all(sq);
                            let scaled = tape.mul_scalar(
                                sum,
                                (1.0 - spec.lambda_mcq) / reg.len() as f64,
                            );
                            extras.push(scaled);
                        }
                    }
                    _ => {}
                }
                Ok(extras)
            },
        )?;
        let _ = critics_snapshot;

        let bc = (spec.kind == RegKind::Bc).then(|| BcAttachment {
            batch_index: 0, // regularized batch is listed first
            data_actions: &reg.actions,
            nu: spec.nu,
        });
        let actor_loss = actor_step(
            &mut self.sac.policy,
            &mut self.sac.opt_actor,
            &self.sac.critics,
            &[&reg.states, &plain.states],
            self.sac.cfg.alpha,
            bc,
            rng,
        )?;
        self.sac.critics.polyak(self.sac.cfg.polyak);
        self.sac.updates += 1;
        Ok(UpdateStats { critic_loss, actor_loss, aux_loss })
    }
}

/// Pseudo target values: sample `n` actions per state from the behavior
/// model, take the best according to each critic, then the pessimistic
/// minimum across the twin critics.
pub fn mcq_pseudo_targets(
    critics: &offdyn_nn::TwinCritics,
    behavior: &Cvae,
    states: &Array2<f64>,
    n: usize,
    rng: &mut StreamRng,
) -> Result<Array1<f64>, AgentError> {
    if behavior.train_steps == 0 {
        return Err(AgentError::CvaeUntrained);
    }
    let b = states.nrows();
    let ds = states.ncols();
    let mut tiled = Array2::zeros((b * n, ds));
    for i in 0..b {
        for k in 0..n {
            for c in 0..ds {
                tiled[[i * n + k, c]] = states[[i, c]];
            }
        }
    }
    let actions = behavior.sample_eval(&tiled, rng);
    let q1 = critics.q_eval(&critics.q1, &tiled, &actions);
    let q2 = critics.q_eval(&critics.q2, &tiled, &actions);
    Ok(Array1::from_iter((0..b).map(|i| {
        let rows = i * n..(i + 1) * n;
        let max1 = rows.clone().map(|r| q1[r]).fold(f64::NEG_INFINITY, f64::max);
        let max2 = rows.map(|r| q2[r]).fold(f64::NEG_INFINITY, f64::max);
        max1.min(max2)
    })))
}

/// Classifier-weighted hybrid. The two directions use different objectives:
/// with an offline source the conservative penalty acts on weighted source
/// data; with an offline target the overestimation term compares
/// batch-normalized weighted source policy values against target data values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum H2oDirection {
    OfflineOnline,
    OnlineOffline,
}

#[derive(Debug, Clone)]
pub struct H2oAgent {
    pub sac: SacCore,
    pub classifiers: DomainClassifierPair,
    pub direction: H2oDirection,
    pub beta_cql: f64,
    /// Policy actions sampled per source state for the overestimation term
    /// (offline-target direction).
    pub n_sampled: usize,
}

impl H2oAgent {
    pub fn new(
        state_dim: usize,
        action_dim: usize,
        cfg: SacConfig,
        classifier_hidden: &[usize],
        direction: H2oDirection,
        rng: &mut StreamRng,
    ) -> Self {
        let sac = SacCore::new(state_dim, action_dim, cfg, rng);
        let classifiers =
            DomainClassifierPair::new(state_dim, action_dim, classifier_hidden, sac.cfg.lr, rng);
        let beta_cql = match direction {
            H2oDirection::OfflineOnline => 10.0,
            H2oDirection::OnlineOffline => 0.01,
        };
        H2oAgent { sac, classifiers, direction, beta_cql, n_sampled: 10 }
    }

    pub fn update(&mut self, batch: &DualBatchArrays, rng: &mut StreamRng) -> Result<UpdateStats, AgentError> {
        let aux_loss = self.classifiers.train_step(batch, rng)?;
        let omega = self
            .classifiers
            .importance_weight(&batch.src.states, &batch.src.actions, &batch.src.next_states);

        let n = batch.total() as f64;
        let terms = [
            TdTerm {
                batch: &batch.src,
                rewards: None,
                weights: Some(&omega),
                coeff: 1.0 / n,
            },
            TdTerm::plain(&batch.tar, 1.0 / n),
        ];
        let targets = [
            self.sac.td_targets(&terms[0], rng),
            self.sac.td_targets(&terms[1], rng),
        ];

        let critic_loss = match self.direction {
            H2oDirection::OfflineOnline => {
                let (policy_actions, _) =
                    self.sac.policy.sample_batch_eval(&batch.src.states, false, rng);
                let beta = self.beta_cql;
                let src = &batch.src;
                critic_step(
                    &mut self.sac.critics,
                    &mut self.sac.opt_q1,
                    &mut self.sac.opt_q2,
                    &terms,
                    &targets,
                    |tape, g1, g2, layout| {
                        // beta * (E[w Q(s, a~pi)] - E[w Q(s, a_data)]) over
                        // the source batch, both critics.
                        let x_pi = tape.input(stack_state_action(&src.states, &policy_actions));
                        let x_data = tape.input(stack_state_action(&src.states, &src.actions));
                        let w = col(&omega);
                        let mut extras = Vec::new();
                        for g in [g1, g2] {
                            let wv = tape.input(w.clone());
                            let q_pi = layout.forward_tape(tape, g, x_pi);
                            let q_pi_w = tape.mul(q_pi, wv);
                            let s_pi = tape.sum_all(q_pi_w);
                            let wv2 = tape.input(w.clone());
                            let q_data = layout.forward_tape(tape, g, x_data);
                            let q_data_w = tape.mul(q_data, wv2);
                            let s_data = tape.sum_all(q_data_w);
                            let gap = tape.sub(s_pi, s_data);
                            extras.push(tape.mul_scalar(gap, beta / src.len() as f64));
                        }
                        Ok(extras)
                    },
                )?
            }
            H2oDirection::OnlineOffline => {
                // Batch-normalized weights over the source batch.
                let w_tilde = self.classifiers.batch_weight(
                    &batch.src.states,
                    &batch.src.actions,
                    &batch.src.next_states,
                )?;
                let b = batch.src.len();
                let k = self.n_sampled;
                let ds = batch.src.state_dim();
                let mut tiled = Array2::zeros((b * k, ds));
                for i in 0..b {
                    for s in 0..k {
                        for c in 0..ds {
                            tiled[[i * k + s, c]] = batch.src.states[[i, c]];
                        }
                    }
                }
                let (tiled_actions, _) = self.sac.policy.sample_batch_eval(&tiled, false, rng);
                // Row weights so that sum_rows w q = sum_j w~_j mean_k Q.
                let row_w = Array1::from_iter(
                    (0..b * k).map(|r| w_tilde[r / k] / k as f64),
                );
                let beta = self.beta_cql;
                let tar = &batch.tar;
                critic_step(
                    &mut self.sac.critics,
                    &mut self.sac.opt_q1,
                    &mut self.sac.opt_q2,
                    &terms,
                    &targets,
                    |tape, g1, g2, layout| {
                        let x_pi = tape.input(stack_state_action(&tiled, &tiled_actions));
                        let x_data = tape.input(stack_state_action(&tar.states, &tar.actions));
                        let w = col(&row_w);
                        let mut extras = Vec::new();
                        for g in [g1, g2] {
                            let wv = tape.input(w.clone());
                            let q_pi = layout.forward_tape(tape, g, x_pi);
                            let q_pi_w = tape.mul(q_pi, wv);
                            let s_pi = tape.sum_all(q_pi_w);
                            let q_data = layout.forward_tape(tape, g, x_data);
                            let s_data = tape.sum_all(q_data);
                            let mean_data = tape.mul_scalar(s_data, 1.0 / tar.len() as f64);
                            let gap = tape.sub(s_pi, mean_data);
                            extras.push(tape.mul_scalar(gap, beta));
                        }
                        Ok(extras)
                    },
                )?
            }
        };

        let actor_loss = actor_step(
            &mut self.sac.policy,
            &mut self.sac.opt_actor,
            &self.sac.critics,
            &[&batch.src.states, &batch.tar.states],
            self.sac.cfg.alpha,
            None,
            rng,
        )?;
        self.sac.critics.polyak(self.sac.cfg.polyak);
        self.sac.updates += 1;
        Ok(UpdateStats { critic_loss, actor_loss, aux_loss })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RlpdConfig {
    pub ensemble_size: usize,
    pub target_subset: usize,
    pub update_to_data: u32,
    pub layer_norm: bool,
    pub entropy_backup: bool,
    pub clipped_double_q: bool,
}

impl Default for RlpdConfig {
    fn default() -> Self {
        RlpdConfig {
            ensemble_size: 10,
            target_subset: 2,
            update_to_data: 1,
            layer_norm: true,
            entropy_backup: true,
            clipped_double_q: true,
        }
    }
}

/// Critic-ensemble agent: targets from a random subset of the ensemble,
/// layer-normalized critics, no explicit conservatism.
#[derive(Debug, Clone)]
pub struct RlpdAgent {
    pub policy: GaussianPolicy,
    pub ensemble: CriticEnsemble,
    opt_actor: Adam,
    opt_critics: Vec<Adam>,
    subset_rng: StreamRng,
    pub cfg: SacConfig,
    pub rcfg: RlpdConfig,
    pub updates: u64,
}

impl RlpdAgent {
    pub fn new(
        state_dim: usize,
        action_dim: usize,
        cfg: SacConfig,
        rcfg: RlpdConfig,
        subset_rng: StreamRng,
        rng: &mut StreamRng,
    ) -> Self {
        assert!(rcfg.target_subset <= rcfg.ensemble_size);
        let policy = GaussianPolicy::new(state_dim, action_dim, &cfg.actor_hidden, rng);
        let ensemble = CriticEnsemble::new(
            state_dim,
            action_dim,
            &cfg.critic_hidden,
            rcfg.ensemble_size,
            rcfg.layer_norm,
            rng,
        );
        let opt_actor = Adam::new(cfg.lr, policy.net.params.len());
        let opt_critics = ensemble
            .online
            .iter()
            .map(|p| Adam::new(cfg.lr, p.len()))
            .collect();
        RlpdAgent { policy, ensemble, opt_actor, opt_critics, subset_rng, cfg, rcfg, updates: 0 }
    }

    fn draw_subset(&mut self) -> Vec<usize> {
        let e = self.rcfg.ensemble_size;
        let k = self.rcfg.target_subset;
        let mut picked: Vec<usize> = Vec::with_capacity(k);
        while picked.len() < k {
            let i = self.subset_rng.random_range(0..e);
            if !picked.contains(&i) {
                picked.push(i);
            }
        }
        picked.sort_unstable();
        picked
    }

    pub fn update(&mut self, batch: &DualBatchArrays, rng: &mut StreamRng) -> Result<UpdateStats, AgentError> {
        // Policy noise first so the rng stream aligns with the twin-critic
        // agents; the subset comes from a dedicated stream.
        let n = batch.total() as f64;
        let mut_batches = [&batch.src, &batch.tar];
        let next_draws: Vec<(Array2<f64>, Array1<f64>)> = mut_batches
            .iter()
            .map(|b| self.policy.sample_batch_eval(&b.next_states, false, rng))
            .collect();
        let subset = self.draw_subset();
        let targets: Vec<Array1<f64>> = mut_batches
            .iter()
            .zip(&next_draws)
            .map(|(b, (next_actions, logp))| {
                let member_q: Vec<Array1<f64>> = subset
                    .iter()
                    .map(|&i| self.ensemble.q_eval(&self.ensemble.target[i], &b.next_states, next_actions))
                    .collect();
                Array1::from_iter((0..b.len()).map(|r| {
                    let agg = if self.rcfg.clipped_double_q {
                        member_q.iter().map(|q| q[r]).fold(f64::INFINITY, f64::min)
                    } else {
                        member_q.iter().map(|q| q[r]).sum::<f64>() / member_q.len() as f64
                    };
                    let backup = if self.rcfg.entropy_backup {
                        agg - self.cfg.alpha * logp[r]
                    } else {
                        agg
                    };
                    b.rewards[r] + self.cfg.gamma * (1.0 - b.done[r]) * backup
                }))
            })
            .collect();

        // Critic step: sum over ensemble members of the combined-mean TD.
        let mut tape = Tape::new();
        let groups: Vec<GroupId> = self
            .ensemble
            .online
            .iter()
            .map(|p| tape.register(&p.0, true))
            .collect();
        let mut total: Option<Var> = None;
        for (b, y) in mut_batches.iter().zip(&targets) {
            let x = tape.input(stack_state_action(&b.states, &b.actions));
            let y_const = tape.input(col(y));
            let mut member_sum: Option<Var> = None;
            for &g in &groups {
                let q = self.ensemble.layout.forward_tape(&mut tape, g, x);
                let resid = tape.sub(q, y_const);
                let sq = tape.square(resid);
                let s = tape.sum_all(sq);
                member_sum = Some(match member_sum {
                    Some(acc) => tape.add(acc, s),
                    None => s,
                });
            }
            let scaled = tape.mul_scalar(member_sum.unwrap(), 1.0 / n);
            total = Some(match total {
                Some(acc) => tape.add(acc, scaled),
                None => scaled,
            });
        }
        let loss = total.unwrap();
        let critic_loss = tape.scalar(loss);
        if !critic_loss.is_finite() {
            return Err(AgentError::NonFiniteLoss(critic_loss));
        }
        tape.backward(loss);
        let grads: Vec<Vec<f64>> = groups.iter().map(|&g| tape.group_grad(g).to_vec()).collect();
        drop(tape);
        for ((params, opt), grad) in self
            .ensemble
            .online
            .iter_mut()
            .zip(&mut self.opt_critics)
            .zip(&grads)
        {
            opt.step(&mut params.0, grad)?;
        }

        // Actor: pessimistic over the drawn subset when clipped double-Q is
        // on, otherwise the ensemble mean.
        let actor_loss = self.actor_step(batch, &subset, rng)?;
        self.ensemble.polyak(self.cfg.polyak);
        self.updates += 1;
        Ok(UpdateStats { critic_loss, actor_loss, aux_loss: 0.0 })
    }

    fn actor_step(
        &mut self,
        batch: &DualBatchArrays,
        subset: &[usize],
        rng: &mut StreamRng,
    ) -> Result<f64, AgentError> {
        let n = batch.total() as f64;
        let mut tape = Tape::new();
        let members: Vec<usize> = if self.rcfg.clipped_double_q {
            subset.to_vec()
        } else {
            (0..self.rcfg.ensemble_size).collect()
        };
        let member_groups: Vec<GroupId> = members
            .iter()
            .map(|&i| tape.register(&self.ensemble.online[i].0, false))
            .collect();

        let mut policy_groups = Vec::new();
        let mut acc: Option<Var> = None;
        for b in [&batch.src, &batch.tar] {
            let eps = GaussianPolicy::draw_eps(b.len(), self.policy.action_dim, rng);
            let sample = self.policy.rsample_tape(&mut tape, &b.states, &eps, true);
            policy_groups.push(sample.group);
            let s_const = tape.input(b.states.clone());
            let x = tape.concat(s_const, sample.action);
            let member_qs: Vec<Var> = member_groups
                .iter()
                .map(|&g| self.ensemble.layout.forward_tape(&mut tape, g, x))
                .collect();
            let agg = if self.rcfg.clipped_double_q {
                let mut m = member_qs[0];
                for &q in &member_qs[1..] {
                    m = tape.min2(m, q);
                }
                m
            } else {
                let mut s = member_qs[0];
                for &q in &member_qs[1..] {
                    s = tape.add(s, q);
                }
                tape.mul_scalar(s, 1.0 / member_qs.len() as f64)
            };
            let ent = tape.mul_scalar(sample.log_prob, self.cfg.alpha);
            let qterm = tape.sub(agg, ent);
            let sum = tape.sum_all(qterm);
            acc = Some(match acc {
                Some(a) => tape.add(a, sum),
                None => sum,
            });
        }
        let loss = tape.mul_scalar(acc.unwrap(), -1.0 / n);
        let loss_val = tape.scalar(loss);
        if !loss_val.is_finite() {
            return Err(AgentError::NonFiniteLoss(loss_val));
        }
        tape.backward(loss);
        let mut grads = vec![0.0; self.policy.net.params.len()];
        for g in policy_groups {
            for (acc, v) in grads.iter_mut().zip(tape.group_grad(g)) {
                *acc += v;
            }
        }
        self.opt_actor.step(&mut self.policy.net.params.0, &grads)?;
        Ok(loss_val)
    }
}

/// Composite agents that attach a BC term to a base VGDF/PAR update.
pub enum HybridAgent {
    Regularized(RegularizedSac),
    Vgdf { inner: VgdfAgent, nu: f64 },
    Par { inner: ParAgent, bc_domain: Domain, nu: f64 },
    H2o(H2oAgent),
    Rlpd(RlpdAgent),
}

impl HybridAgent {
    /// Builds the named hybrid with desk-scale auxiliary model sizes.
    pub fn build(
        algo: HybridAlgo,
        state_dim: usize,
        action_dim: usize,
        cfg: SacConfig,
        cvae_hidden: &[usize],
        rng: &mut StreamRng,
    ) -> Self {
        match algo {
            HybridAlgo::BcSac
            | HybridAlgo::CqlSac
            | HybridAlgo::McqSac
            | HybridAlgo::SacBc
            | HybridAlgo::SacCql
            | HybridAlgo::SacMcq => {
                let spec = algo.regularizer().expect("regularized algo");
                HybridAgent::Regularized(RegularizedSac::new(
                    state_dim, action_dim, cfg, spec, cvae_hidden, rng,
                ))
            }
            HybridAlgo::BcVgdf => HybridAgent::Vgdf {
                inner: VgdfAgent::new(state_dim, action_dim, cfg, VgdfConfig::desk(), rng),
                nu: 5.0,
            },
            HybridAlgo::BcPar => HybridAgent::Par {
                inner: ParAgent::new(state_dim, action_dim, cfg, ParConfig::desk(), rng),
                bc_domain: Domain::Source,
                nu: 5.0,
            },
            HybridAlgo::ParBc => HybridAgent::Par {
                inner: ParAgent::new(state_dim, action_dim, cfg, ParConfig::desk(), rng),
                bc_domain: Domain::Target,
                nu: 5.0,
            },
        }
    }

    pub fn update(&mut self, batch: &DualBatchArrays, rng: &mut StreamRng) -> Result<UpdateStats, AgentError> {
        match self {
            HybridAgent::Regularized(a) => a.update(batch, rng),
            HybridAgent::Vgdf { inner, nu } => inner.update(batch, Some((Domain::Source, *nu)), rng),
            HybridAgent::Par { inner, bc_domain, nu } => inner.update(batch, Some((*bc_domain, *nu)), rng),
            HybridAgent::H2o(a) => a.update(batch, rng),
            HybridAgent::Rlpd(a) => a.update(batch, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sac::tests_support::toy_dual;
    use offdyn_core::stream_rng;

    fn desk_sac() -> SacConfig {
        SacConfig {
            actor_hidden: vec![8, 8],
            critic_hidden: vec![8, 8],
            ..SacConfig::desk()
        }
    }

    #[test]
    fn compose_hybrid_wires_domains() {
        let spec = compose_hybrid("CQL_SAC").unwrap().regularizer().unwrap();
        assert_eq!(spec.kind, RegKind::Cql);
        assert_eq!(spec.applied_domain, Domain::Source);
        let spec = compose_hybrid("SAC_MCQ").unwrap().regularizer().unwrap();
        assert_eq!(spec.kind, RegKind::Mcq);
        assert_eq!(spec.applied_domain, Domain::Target);
        assert_eq!(compose_hybrid("PAR_BC").unwrap(), HybridAlgo::ParBc);
        assert!(matches!(
            compose_hybrid("SAC_TRPO"),
            Err(AgentError::UnknownAlgorithm(_))
        ));
    }

    #[test]
    fn lambda_normalization_formula() {
        // nu = 2.5, mean |min Q| = 10 -> lambda = 0.25 (checked through the
        // actor-step scaling path).
        let nu = 2.5;
        let mean_abs: f64 = 10.0;
        let lambda = nu / mean_abs.max(crate::sac::Q_MEAN_FLOOR);
        assert_eq!(lambda, 0.25);
    }

    #[test]
    fn domain_role_symmetry_is_bit_exact() {
        // X_SAC on (A as source, B as target) must equal SAC_X on
        // (B as source, A as target), for every regularizer kind.
        let batch = toy_dual(71, 10);
        let swapped = DualBatchArrays { src: batch.tar.clone(), tar: batch.src.clone() };

        for (src_name, tar_name) in [("BC_SAC", "SAC_BC"), ("CQL_SAC", "SAC_CQL"), ("MCQ_SAC", "SAC_MCQ")] {
            let algo_src = compose_hybrid(src_name).unwrap();
            let algo_tar = compose_hybrid(tar_name).unwrap();
            let mut rng_init = stream_rng(72, "init");
            let mut a = HybridAgent::build(algo_src, 3, 2, desk_sac(), &[8], &mut rng_init);
            let mut rng_init2 = stream_rng(72, "init");
            let mut b = HybridAgent::build(algo_tar, 3, 2, desk_sac(), &[8], &mut rng_init2);

            let mut rng_a = stream_rng(73, "upd");
            let mut rng_b = stream_rng(73, "upd");
            let sa = a.update(&batch, &mut rng_a).unwrap();
            let sb = b.update(&swapped, &mut rng_b).unwrap();
            assert_eq!(
                sa.critic_loss.to_bits(),
                sb.critic_loss.to_bits(),
                "{src_name} vs {tar_name} critic"
            );
            assert_eq!(
                sa.actor_loss.to_bits(),
                sb.actor_loss.to_bits(),
                "{src_name} vs {tar_name} actor"
            );
        }
    }

    #[test]
    fn cql_beta_zero_reduces_to_sac() {
        let batch = toy_dual(75, 9);
        let mut rng_init = stream_rng(76, "init");
        let mut spec = RegularizerSpec::new(RegKind::Cql, Domain::Source);
        spec.beta_cql = 0.0;
        let mut cql = RegularizedSac::new(3, 2, desk_sac(), spec, &[8], &mut rng_init);
        let mut sac = cql.sac.clone();

        let mut rng_a = stream_rng(77, "upd");
        let sa = cql.update(&batch, &mut rng_a).unwrap();

        // Plain SAC with the same role ordering (source first) and the extra
        // policy draw consumed by the (zero-weighted) penalty term.
        let n = batch.total() as f64;
        let mut rng_b = stream_rng(77, "upd");
        let terms = [
            TdTerm::plain(&batch.src, 1.0 / n),
            TdTerm::plain(&batch.tar, 1.0 / n),
        ];
        let targets = [
            sac.td_targets(&terms[0], &mut rng_b),
            sac.td_targets(&terms[1], &mut rng_b),
        ];
        let _ = sac.policy.sample_batch_eval(&batch.src.states, false, &mut rng_b);
        let critic_loss = critic_step(
            &mut sac.critics,
            &mut sac.opt_q1,
            &mut sac.opt_q2,
            &terms,
            &targets,
            crate::sac::NO_EXTRA,
        )
        .unwrap();
        let actor_loss = actor_step(
            &mut sac.policy,
            &mut sac.opt_actor,
            &sac.critics,
            &[&batch.src.states, &batch.tar.states],
            sac.cfg.alpha,
            None,
            &mut rng_b,
        )
        .unwrap();
        assert_eq!(sa.critic_loss.to_bits(), critic_loss.to_bits());
        assert_eq!(sa.actor_loss.to_bits(), actor_loss.to_bits());
    }

    #[test]
    fn mcq_pseudo_targets_match_brute_force() {
        let mut rng = stream_rng(81, "init");
        let critics = offdyn_nn::TwinCritics::new(3, 2, &[8], false, &mut rng);
        let mut cvae = Cvae::new(CvaeSpec::behavior(2, 3).with_hidden(&[8]), &mut rng);
        let batch = toy_dual(82, 6);
        let mut trng = stream_rng(83, "cvae");
        cvae.train_step(&batch.src.actions, &batch.src.states, &mut trng).unwrap();

        // Frozen sample set: replay the same rng to enumerate the sampled
        // actions, then brute-force max/min over them.
        let n = 10;
        let mut rng_a = stream_rng(84, "samples");
        let y = mcq_pseudo_targets(&critics, &cvae, &batch.src.states, n, &mut rng_a).unwrap();

        let b = batch.src.len();
        let ds = 3;
        let mut tiled = Array2::zeros((b * n, ds));
        for i in 0..b {
            for k in 0..n {
                for c in 0..ds {
                    tiled[[i * n + k, c]] = batch.src.states[[i, c]];
                }
            }
        }
        let mut rng_b = stream_rng(84, "samples");
        let actions = cvae.sample_eval(&tiled, &mut rng_b);
        for i in 0..b {
            let mut best = f64::NEG_INFINITY;
            for k in 0..n {
                let row = i * n + k;
                let s = tiled.row(row).insert_axis(ndarray::Axis(0)).to_owned();
                let a = actions.row(row).insert_axis(ndarray::Axis(0)).to_owned();
                let q1 = critics.q_eval(&critics.q1, &s, &a)[0];
                let _ = q1;
            }
            // min over critics of (max over samples per critic)
            let rows = i * n..(i + 1) * n;
            let s_block = tiled.slice(ndarray::s![i * n..(i + 1) * n, ..]).to_owned();
            let a_block = actions.slice(ndarray::s![i * n..(i + 1) * n, ..]).to_owned();
            let q1 = critics.q_eval(&critics.q1, &s_block, &a_block);
            let q2 = critics.q_eval(&critics.q2, &s_block, &a_block);
            let m1 = q1.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let m2 = q2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            best = best.max(m1.min(m2));
            assert_eq!(y[i], best, "state {i}");
            let _ = rows;
        }
    }

    #[test]
    fn mcq_single_sample_degenerates_to_min_of_twins() {
        let mut rng = stream_rng(85, "init");
        let critics = offdyn_nn::TwinCritics::new(3, 2, &[8], false, &mut rng);
        let mut cvae = Cvae::new(CvaeSpec::behavior(2, 3).with_hidden(&[8]), &mut rng);
        let batch = toy_dual(86, 4);
        let mut trng = stream_rng(87, "cvae");
        cvae.train_step(&batch.src.actions, &batch.src.states, &mut trng).unwrap();
        let mut rng_a = stream_rng(88, "s");
        let y = mcq_pseudo_targets(&critics, &cvae, &batch.src.states, 1, &mut rng_a).unwrap();
        let mut rng_b = stream_rng(88, "s");
        let actions = cvae.sample_eval(&batch.src.states, &mut rng_b);
        let q1 = critics.q_eval(&critics.q1, &batch.src.states, &actions);
        let q2 = critics.q_eval(&critics.q2, &batch.src.states, &actions);
        for i in 0..4 {
            assert_eq!(y[i], q1[i].min(q2[i]));
        }
    }

    #[test]
    fn mcq_untrained_behavior_model_is_an_error() {
        let mut rng = stream_rng(89, "init");
        let critics = offdyn_nn::TwinCritics::new(3, 2, &[8], false, &mut rng);
        let cvae = Cvae::new(CvaeSpec::behavior(2, 3).with_hidden(&[8]), &mut rng);
        let batch = toy_dual(90, 4);
        let mut r = stream_rng(91, "s");
        assert!(matches!(
            mcq_pseudo_targets(&critics, &cvae, &batch.src.states, 10, &mut r),
            Err(AgentError::CvaeUntrained)
        ));
    }

    #[test]
    fn h2o_weights_stay_clipped_and_normalized() {
        let mut rng = stream_rng(92, "init");
        let mut agent = H2oAgent::new(3, 2, desk_sac(), &[8], H2oDirection::OnlineOffline, &mut rng);
        assert_eq!(agent.beta_cql, 0.01);
        let batch = toy_dual(93, 8);
        let mut upd = stream_rng(94, "upd");
        agent.update(&batch, &mut upd).unwrap();
        let w = agent
            .classifiers
            .batch_weight(&batch.src.states, &batch.src.actions, &batch.src.next_states)
            .unwrap();
        assert!((w.sum() - 1.0).abs() < 1e-6);
        let omega = agent.classifiers.importance_weight(
            &batch.src.states,
            &batch.src.actions,
            &batch.src.next_states,
        );
        assert!(omega.iter().all(|v| (1e-4..=1.0).contains(v)));
    }

    #[test]
    fn rlpd_with_two_critics_reduces_to_sac() {
        let batch = toy_dual(95, 7);
        let cfg = desk_sac();
        let rcfg = RlpdConfig {
            ensemble_size: 2,
            target_subset: 2,
            update_to_data: 1,
            layer_norm: false,
            entropy_backup: true,
            clipped_double_q: true,
        };
        let mut rlpd = RlpdAgent::new(
            3,
            2,
            cfg.clone(),
            rcfg,
            stream_rng(96, "subset"),
            &mut stream_rng(97, "init"),
        );
        let mut sac = SacCore::new(3, 2, cfg, &mut stream_rng(97, "init"));
        // Same init stream -> identical starting parameters.
        assert_eq!(rlpd.policy.net.params, sac.policy.net.params);
        assert_eq!(rlpd.ensemble.online[0], sac.critics.q1);
        assert_eq!(rlpd.ensemble.online[1], sac.critics.q2);

        let mut rng_a = stream_rng(98, "upd");
        let mut rng_b = stream_rng(98, "upd");
        let a = rlpd.update(&batch, &mut rng_a).unwrap();
        let b = sac.update(&batch, &mut rng_b).unwrap();
        assert_eq!(a.critic_loss.to_bits(), b.critic_loss.to_bits());
        assert_eq!(a.actor_loss.to_bits(), b.actor_loss.to_bits());
        assert_eq!(rlpd.policy.net.params, sac.policy.net.params);
        assert_eq!(rlpd.ensemble.online[0], sac.critics.q1);
    }
}
