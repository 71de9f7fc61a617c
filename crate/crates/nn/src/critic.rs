//! Q-networks: the twin-critic pair used by most agents and the larger
//! critic ensemble used by the random-ensemble-distillation agent.

use crate::mlp::{MlpLayout, Params};
use crate::optim::polyak_update;
use ndarray::{Array1, Array2};
use offdyn_core::StreamRng;

/// Stacks `[s ‖ a]` rows for critic input.
pub fn stack_state_action(states: &Array2<f64>, actions: &Array2<f64>) -> Array2<f64> {
    let (b, ds) = states.dim();
    let da = actions.ncols();
    let mut x = Array2::zeros((b, ds + da));
    x.slice_mut(ndarray::s![.., ..ds]).assign(states);
    x.slice_mut(ndarray::s![.., ds..]).assign(actions);
    x
}

/// Two independent Q-networks plus polyak-averaged target copies.
#[derive(Debug, Clone)]
pub struct TwinCritics {
    pub layout: MlpLayout,
    pub q1: Params,
    pub q2: Params,
    pub target1: Params,
    pub target2: Params,
}

impl TwinCritics {
    pub fn new(
        state_dim: usize,
        action_dim: usize,
        hidden: &[usize],
        layer_norm: bool,
        rng: &mut StreamRng,
    ) -> Self {
        let mut layout = MlpLayout::new(state_dim + action_dim, hidden, 1);
        layout.layer_norm = layer_norm;
        let q1 = layout.init(rng);
        let q2 = layout.init(rng);
        let target1 = q1.clone();
        let target2 = q2.clone();
        TwinCritics { layout, q1, q2, target1, target2 }
    }

    pub fn q_eval(&self, params: &Params, states: &Array2<f64>, actions: &Array2<f64>) -> Array1<f64> {
        let x = stack_state_action(states, actions);
        self.layout.forward_eval(&params.0, &x).column(0).to_owned()
    }

    /// `min_i target_Q_i(s, a)`.
    pub fn min_target_eval(&self, states: &Array2<f64>, actions: &Array2<f64>) -> Array1<f64> {
        let a = self.q_eval(&self.target1, states, actions);
        let b = self.q_eval(&self.target2, states, actions);
        Array1::from_iter(a.iter().zip(b.iter()).map(|(x, y)| x.min(*y)))
    }

    /// `min_i online_Q_i(s, a)`.
    pub fn min_online_eval(&self, states: &Array2<f64>, actions: &Array2<f64>) -> Array1<f64> {
        let a = self.q_eval(&self.q1, states, actions);
        let b = self.q_eval(&self.q2, states, actions);
        Array1::from_iter(a.iter().zip(b.iter()).map(|(x, y)| x.min(*y)))
    }

    pub fn polyak(&mut self, rate: f64) {
        polyak_update(&mut self.target1.0, &self.q1.0, rate).expect("matching critic shapes");
        polyak_update(&mut self.target2.0, &self.q2.0, rate).expect("matching critic shapes");
    }
}

/// An ensemble of independently initialized critics with target copies.
#[derive(Debug, Clone)]
pub struct CriticEnsemble {
    pub layout: MlpLayout,
    pub online: Vec<Params>,
    pub target: Vec<Params>,
}

impl CriticEnsemble {
    pub fn new(
        state_dim: usize,
        action_dim: usize,
        hidden: &[usize],
        size: usize,
        layer_norm: bool,
        rng: &mut StreamRng,
    ) -> Self {
        let mut layout = MlpLayout::new(state_dim + action_dim, hidden, 1);
        layout.layer_norm = layer_norm;
        let online: Vec<Params> = (0..size).map(|_| layout.init(rng)).collect();
        let target = online.clone();
        CriticEnsemble { layout, online, target }
    }

    pub fn size(&self) -> usize {
        self.online.len()
    }

    pub fn q_eval(&self, params: &Params, states: &Array2<f64>, actions: &Array2<f64>) -> Array1<f64> {
        let x = stack_state_action(states, actions);
        self.layout.forward_eval(&params.0, &x).column(0).to_owned()
    }

    pub fn polyak(&mut self, rate: f64) {
        for (t, o) in self.target.iter_mut().zip(&self.online) {
            polyak_update(&mut t.0, &o.0, rate).expect("matching ensemble shapes");
        }
    }
}
