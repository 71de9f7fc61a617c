//! Conditional VAE used as a learned behavior policy (action model) or as a
//! transition-density model.
//!
//! The decoder predicts a diagonal Gaussian (mean, log-variance). In
//! `tanh_space` mode the Gaussian lives in pre-squash space and densities
//! carry the tanh change-of-variables term, so modeled samples always land in
//! `[-1, 1]`.

use crate::error::NnError;
use crate::mlp::{Mlp, MlpLayout};
use crate::optim::Adam;
use crate::tape::{Tape, Var};
use ndarray::{Array1, Array2};
use offdyn_core::StreamRng;
use rand_distr::{Distribution, StandardNormal};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const ENC_LOGVAR_RANGE: (f64, f64) = (-8.0, 8.0);
const DEC_LOGVAR_RANGE: (f64, f64) = (-8.0, 4.0);
const ATANH_CLIP: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone)]
pub struct CvaeSpec {
    pub x_dim: usize,
    pub cond_dim: usize,
    pub latent_dim: usize,
    pub hidden: Vec<usize>,
    pub tanh_space: bool,
    pub lr: f64,
}

impl CvaeSpec {
    /// Defaults for the behavior-policy use: latent `2*dA`, hidden 750x3,
    /// learning rate 1e-3, squashed outputs.
    pub fn behavior(action_dim: usize, state_dim: usize) -> Self {
        CvaeSpec {
            x_dim: action_dim,
            cond_dim: state_dim,
            latent_dim: 2 * action_dim,
            hidden: vec![750, 750, 750],
            tanh_space: true,
            lr: 1e-3,
        }
    }

    /// Defaults for the transition-density use: models `s'` given `(s, a)`.
    pub fn dynamics(state_dim: usize, action_dim: usize) -> Self {
        CvaeSpec {
            x_dim: state_dim,
            cond_dim: state_dim + action_dim,
            latent_dim: 2 * state_dim,
            hidden: vec![750, 750, 750],
            tanh_space: false,
            lr: 1e-3,
        }
    }

    pub fn with_hidden(mut self, hidden: &[usize]) -> Self {
        self.hidden = hidden.to_vec();
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CvaeStats {
    pub loss: f64,
}

#[derive(Debug, Clone)]
pub struct Cvae {
    pub spec: CvaeSpec,
    pub encoder: Mlp,
    pub decoder: Mlp,
    opt_enc: Adam,
    opt_dec: Adam,
    pub train_steps: u64,
}

fn concat_cols(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let mut out = Array2::zeros((a.nrows(), a.ncols() + b.ncols()));
    out.slice_mut(ndarray::s![.., ..a.ncols()]).assign(a);
    out.slice_mut(ndarray::s![.., a.ncols()..]).assign(b);
    out
}

impl Cvae {
    pub fn new(spec: CvaeSpec, rng: &mut StreamRng) -> Self {
        let enc = Mlp::new(
            MlpLayout::new(spec.x_dim + spec.cond_dim, &spec.hidden, 2 * spec.latent_dim),
            rng,
        );
        let dec = Mlp::new(
            MlpLayout::new(spec.cond_dim + spec.latent_dim, &spec.hidden, 2 * spec.x_dim),
            rng,
        );
        let opt_enc = Adam::new(spec.lr, enc.params.len());
        let opt_dec = Adam::new(spec.lr, dec.params.len());
        Cvae { spec, encoder: enc, decoder: dec, opt_enc, opt_dec, train_steps: 0 }
    }

    /// Builds the per-row evidence lower bound `[B, 1]` on the tape:
    /// `mean_k log p(x | z_k, cond) - KL(q(z|x,cond) || N(0, I))`, including
    /// the tanh change-of-variables term when applicable. `x` may be any tape
    /// node of shape `[B, x_dim]`; gradients flow into it.
    pub fn elbo_tape(
        &self,
        tape: &mut Tape,
        x: Var,
        cond: &Array2<f64>,
        k_samples: usize,
        track: bool,
        rng: &mut StreamRng,
    ) -> Var {
        self.elbo_tape_groups(tape, x, cond, k_samples, track, rng).0
    }

    /// As [`Cvae::elbo_tape`], also returning the (encoder, decoder) groups.
    fn elbo_tape_groups(
        &self,
        tape: &mut Tape,
        x: Var,
        cond: &Array2<f64>,
        k_samples: usize,
        track: bool,
        rng: &mut StreamRng,
    ) -> (Var, crate::tape::GroupId, crate::tape::GroupId) {
        let b = cond.nrows();
        let l = self.spec.latent_dim;
        let cond_v = tape.input(cond.clone());

        // y = atanh(x) in tanh space, else y = x.
        let (y, jac_sum) = if self.spec.tanh_space {
            let xc = tape.clamp(x, -ATANH_CLIP, ATANH_CLIP);
            let num = tape.add_scalar(xc, 1.0);
            let negx = tape.neg(xc);
            let den = tape.add_scalar(negx, 1.0);
            let ratio = tape.div(num, den);
            let lnr = tape.ln(ratio);
            let y = tape.mul_scalar(lnr, 0.5);
            let x_sq = tape.square(xc);
            let neg_sq = tape.neg(x_sq);
            let one_m = tape.add_scalar(neg_sq, 1.0);
            let ln_one_m = tape.ln(one_m);
            let jac = tape.sum_cols(ln_one_m);
            (y, Some(jac))
        } else {
            (x, None)
        };

        let enc_in = tape.concat(x, cond_v);
        let enc_g = tape.register(&self.encoder.params.0, track);
        let enc_out = self.encoder.layout.forward_tape(tape, enc_g, enc_in);
        let mu = tape.slice_cols(enc_out, 0, l);
        let raw_lv = tape.slice_cols(enc_out, l, 2 * l);
        let logvar = tape.clamp(raw_lv, ENC_LOGVAR_RANGE.0, ENC_LOGVAR_RANGE.1);

        // KL(q || N(0,I)) = 0.5 sum(mu^2 + e^lv - 1 - lv)
        let mu_sq = tape.square(mu);
        let e_lv = tape.exp(logvar);
        let t1 = tape.add(mu_sq, e_lv);
        let t2 = tape.sub(t1, logvar);
        let t3 = tape.add_scalar(t2, -1.0);
        let kl_terms = tape.mul_scalar(t3, 0.5);
        let kl = tape.sum_cols(kl_terms);

        let half_lv = tape.mul_scalar(logvar, 0.5);
        let sigma = tape.exp(half_lv);
        let dec_g = tape.register(&self.decoder.params.0, track);

        let mut recon_sum: Option<Var> = None;
        for _ in 0..k_samples {
            let eps = tape.input(Array2::from_shape_fn((b, l), |_| StandardNormal.sample(rng)));
            let noise = tape.mul(sigma, eps);
            let z = tape.add(mu, noise);
            let dec_in = tape.concat(cond_v, z);
            let dec_out = self.decoder.layout.forward_tape(tape, dec_g, dec_in);
            let m = tape.slice_cols(dec_out, 0, self.spec.x_dim);
            let raw_dlv = tape.slice_cols(dec_out, self.spec.x_dim, 2 * self.spec.x_dim);
            let dlv = tape.clamp(raw_dlv, DEC_LOGVAR_RANGE.0, DEC_LOGVAR_RANGE.1);

            // log N(y; m, e^dlv) per row
            let diff = tape.sub(y, m);
            let diff_sq = tape.square(diff);
            let neg_dlv = tape.neg(dlv);
            let inv_var = tape.exp(neg_dlv);
            let quad = tape.mul(diff_sq, inv_var);
            let quad_half = tape.mul_scalar(quad, -0.5);
            let dlv_half = tape.mul_scalar(dlv, -0.5);
            let terms = tape.add(quad_half, dlv_half);
            let row = tape.sum_cols(terms);
            let logp = tape.add_scalar(row, -(self.spec.x_dim as f64) * HALF_LN_2PI);
            recon_sum = Some(match recon_sum {
                Some(acc) => tape.add(acc, logp),
                None => logp,
            });
        }
        let recon = tape.mul_scalar(recon_sum.expect("k_samples >= 1"), 1.0 / k_samples as f64);
        let mut elbo = tape.sub(recon, kl);
        if let Some(jac) = jac_sum {
            elbo = tape.sub(elbo, jac);
        }
        (elbo, enc_g, dec_g)
    }

    /// One gradient step on `-ELBO` (single latent sample).
    pub fn train_step(
        &mut self,
        x: &Array2<f64>,
        cond: &Array2<f64>,
        rng: &mut StreamRng,
    ) -> Result<CvaeStats, NnError> {
        let mut tape = Tape::new();
        let xv = tape.input(x.clone());
        let (elbo, enc_g, dec_g) = self.elbo_tape_groups(&mut tape, xv, cond, 1, true, rng);
        let neg = tape.neg(elbo);
        let loss = tape.mean_all(neg);
        let loss_val = tape.scalar(loss);
        if !loss_val.is_finite() {
            return Err(NnError::NonFiniteLoss(loss_val));
        }
        tape.backward(loss);
        let enc_grad: Vec<f64> = tape.group_grad(enc_g).to_vec();
        let dec_grad: Vec<f64> = tape.group_grad(dec_g).to_vec();
        self.opt_enc.step(&mut self.encoder.params.0, &enc_grad)?;
        self.opt_dec.step(&mut self.decoder.params.0, &dec_grad)?;
        self.train_steps += 1;
        Ok(CvaeStats { loss: loss_val })
    }

    /// Per-row ELBO-based log-density estimate (no gradients).
    pub fn log_density_eval(
        &self,
        x: &Array2<f64>,
        cond: &Array2<f64>,
        k_samples: usize,
        rng: &mut StreamRng,
    ) -> Array1<f64> {
        let mut tape = Tape::new();
        let xv = tape.input(x.clone());
        let elbo = self.elbo_tape(&mut tape, xv, cond, k_samples, false, rng);
        tape.value(elbo).column(0).to_owned()
    }

    /// Decodes one sample per conditioning row with `z ~ N(0, I)`, using the
    /// decoder mean (squashed in tanh mode).
    pub fn sample_eval(&self, cond: &Array2<f64>, rng: &mut StreamRng) -> Array2<f64> {
        let b = cond.nrows();
        let z = Array2::from_shape_fn((b, self.spec.latent_dim), |_| StandardNormal.sample(rng));
        let dec_in = concat_cols(cond, &z);
        let out = self.decoder.forward_eval(&dec_in);
        let mean = out.slice(ndarray::s![.., ..self.spec.x_dim]).to_owned();
        if self.spec.tanh_space {
            mean.mapv(f64::tanh)
        } else {
            mean
        }
    }
}
