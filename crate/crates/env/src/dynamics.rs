//! Step and reset for the desk-scale families, plus a stateful wrapper.

use crate::error::EnvError;
use crate::params::{cell_center, cell_of, reacher_fk, EnvParams, EnvState, ACTION_DIM};
use offdyn_core::task::EnvFamily;
use offdyn_core::StreamRng;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub state: EnvState,
    pub reward: f64,
    /// True terminal state (goal reached); bootstrapping stops here.
    pub terminated: bool,
    /// Episode cut off by the time limit; bootstrapping continues.
    pub truncated: bool,
}

fn clamp_action(params: &EnvParams, action: &[f64]) -> [f64; ACTION_DIM] {
    let mut out = [0.0; ACTION_DIM];
    for i in 0..ACTION_DIM {
        let raw = action.get(i).copied().unwrap_or(0.0);
        let (lo, hi) = params.action_clamp[i];
        out[i] = raw.clamp(-1.0, 1.0).clamp(lo, hi);
    }
    out
}

/// Pure transition function. Dynamics are deterministic; all randomness lives
/// in `reset` and in the agents.
pub fn step(params: &EnvParams, state: &EnvState, action: &[f64]) -> StepResult {
    match params.family {
        EnvFamily::PointMass => step_point(params, state, action, false),
        EnvFamily::PointMaze => step_point(params, state, action, true),
        EnvFamily::Reacher => step_reacher(params, state, action),
        other => unreachable!("no dynamics for {}", other.as_str()),
    }
}

fn step_point(params: &EnvParams, state: &EnvState, action: &[f64], maze: bool) -> StepResult {
    let a = clamp_action(params, action);
    let [x, y, vx, vy] = state.q;
    let damp = 1.0 - params.friction_mu * params.dt;
    let ax = a[0] * params.force_scale / params.mass;
    let ay = a[1] * params.force_scale / params.mass - params.gravity_g;
    let mut nvx = (vx * damp + ax * params.dt).clamp(-params.v_max, params.v_max);
    let mut nvy = (vy * damp + ay * params.dt).clamp(-params.v_max, params.v_max);

    let l = params.workspace;
    let (mut nx, mut ny) = (x, y);
    if maze {
        let layout = params.layout.as_ref().expect("maze layout");
        // Axis-separated moves: blocked axes keep position and lose velocity.
        let cand_x = x + nvx * params.dt;
        let (row, col) = cell_of(layout, cand_x.clamp(-l, l), y);
        if cand_x.abs() > l || layout.is_wall(row, col) {
            nvx = 0.0;
        } else {
            nx = cand_x;
        }
        let cand_y = y + nvy * params.dt;
        let (row, col) = cell_of(layout, nx, cand_y.clamp(-l, l));
        if cand_y.abs() > l || layout.is_wall(row, col) {
            nvy = 0.0;
        } else {
            ny = cand_y;
        }
    } else {
        nx = x + nvx * params.dt;
        ny = y + nvy * params.dt;
        if nx.abs() > l {
            nx = nx.clamp(-l, l);
            nvx = 0.0;
        }
        if ny.abs() > l {
            ny = ny.clamp(-l, l);
            nvy = 0.0;
        }
    }

    let step_count = state.step_count + 1;
    let next = EnvState { q: [nx, ny, nvx, nvy], step_count };
    let truncated_at_limit = step_count >= params.episode_len;
    if maze {
        let layout = params.layout.as_ref().expect("maze layout");
        let on_goal = cell_of(layout, nx, ny) == layout.goal_cell();
        StepResult {
            state: next,
            reward: if on_goal { 1.0 } else { 0.0 },
            terminated: on_goal,
            truncated: !on_goal && truncated_at_limit,
        }
    } else {
        let dist = ((nx - params.goal[0]).powi(2) + (ny - params.goal[1]).powi(2)).sqrt();
        StepResult {
            state: next,
            reward: -dist,
            terminated: false,
            truncated: truncated_at_limit,
        }
    }
}

fn step_reacher(params: &EnvParams, state: &EnvState, action: &[f64]) -> StepResult {
    let a = clamp_action(params, action);
    let links = params.link_lengths.expect("reacher links");
    let ranges = params.joint_ranges.expect("reacher joint ranges");
    let [t1, t2, w1, w2] = state.q;
    let mut theta = [t1, t2];
    let mut omega = [w1, w2];
    for i in 0..2 {
        let inertia = params.mass * links[i] * links[i];
        let accel = (a[i] * params.force_scale - params.friction_mu * omega[i]) / inertia;
        omega[i] = (omega[i] + accel * params.dt).clamp(-params.v_max, params.v_max);
        theta[i] += omega[i] * params.dt;
        let (lo, hi) = ranges[i];
        if theta[i] <= lo || theta[i] >= hi {
            theta[i] = theta[i].clamp(lo, hi);
            omega[i] = 0.0;
        }
    }
    let step_count = state.step_count + 1;
    let eff = reacher_fk(&links, theta[0], theta[1]);
    let dist = ((eff[0] - params.goal[0]).powi(2) + (eff[1] - params.goal[1]).powi(2)).sqrt();
    StepResult {
        state: EnvState { q: [theta[0], theta[1], omega[0], omega[1]], step_count },
        reward: -dist,
        terminated: false,
        truncated: step_count >= params.episode_len,
    }
}

/// Draws an initial state. The initial distribution is shared by the source
/// and target variants of a task.
pub fn reset(params: &EnvParams, rng: &mut StreamRng) -> EnvState {
    match params.family {
        EnvFamily::PointMass => {
            let x = -3.5 + rng.random_range(-0.3..0.3);
            let y = -4.5 + rng.random_range(-0.3..0.3);
            EnvState { q: [x, y, 0.0, 0.0], step_count: 0 }
        }
        EnvFamily::Reacher => {
            let t1 = rng.random_range(-0.1..0.1);
            let t2 = rng.random_range(-0.1..0.1);
            EnvState { q: [t1, t2, 0.0, 0.0], step_count: 0 }
        }
        EnvFamily::PointMaze => {
            let layout = params.layout.as_ref().expect("maze layout");
            let [x, y] = cell_center(layout, layout.start_cell());
            EnvState { q: [x, y, 0.0, 0.0], step_count: 0 }
        }
        other => unreachable!("no dynamics for {}", other.as_str()),
    }
}

/// Stateful convenience wrapper with step accounting. The counter backs the
/// budget bookkeeping and the "offline training touches no environment"
/// assertions.
#[derive(Debug, Clone)]
pub struct DeskEnv {
    pub params: EnvParams,
    state: EnvState,
    steps_taken: u64,
    episode_over: bool,
}

impl DeskEnv {
    pub fn new(params: EnvParams) -> Result<Self, EnvError> {
        params.validate()?;
        Ok(DeskEnv {
            state: EnvState { q: [0.0; 4], step_count: 0 },
            params,
            steps_taken: 0,
            episode_over: true,
        })
    }

    pub fn reset(&mut self, rng: &mut StreamRng) -> Vec<f64> {
        self.state = reset(&self.params, rng);
        self.episode_over = false;
        self.state.observation()
    }

    pub fn step(&mut self, action: &[f64]) -> StepResult {
        assert!(!self.episode_over, "step() called on a finished episode");
        let result = step(&self.params, &self.state, action);
        self.state = result.state;
        self.steps_taken += 1;
        if result.terminated || result.truncated {
            self.episode_over = true;
        }
        result
    }

    pub fn state(&self) -> &EnvState {
        &self.state
    }

    pub fn set_state(&mut self, q: [f64; 4], step_count: u32) {
        self.state = EnvState { q, step_count };
        self.episode_over = false;
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }

    pub fn observation(&self) -> Vec<f64> {
        self.state.observation()
    }
}
