//! Environment parameters and state for the desk-scale families.

use crate::error::EnvError;
use crate::layouts::Layout;
use offdyn_core::task::EnvFamily;

// Desk-scale constants: fast CPU episodes with visible shift effects across
// the 0.1-5.0 factor range.
pub const WORKSPACE_HALF_WIDTH: f64 = 5.0;
pub const DT: f64 = 0.05;
pub const MASS: f64 = 1.0;
pub const FORCE_SCALE: f64 = 10.0;
pub const BASE_FRICTION: f64 = 0.5;
pub const BASE_GRAVITY: f64 = 9.8;
pub const V_MAX: f64 = 10.0;
pub const EPISODE_LEN: u32 = 200;
pub const REACHER_LINK: f64 = 1.0;
/// +/-150 degrees.
pub const REACHER_JOINT_RANGE: f64 = 150.0 * std::f64::consts::PI / 180.0;
pub const STATE_DIM: usize = 4;
pub const ACTION_DIM: usize = 2;

/// Initial joint angles whose end-effector position defines the reacher goal
/// (fixed in the base geometry so the reward function is identical across
/// domains).
const REACHER_GOAL_ANGLES: (f64, f64) = (0.3, 0.3);

#[derive(Debug, Clone, PartialEq)]
pub struct EnvParams {
    pub family: EnvFamily,
    pub dt: f64,
    pub mass: f64,
    pub force_scale: f64,
    pub friction_mu: f64,
    pub gravity_g: f64,
    /// Per-dimension action interval, a sub-box of [-1, 1]^dA.
    pub action_clamp: [(f64, f64); ACTION_DIM],
    /// Reacher only.
    pub link_lengths: Option<[f64; 2]>,
    /// Reacher only: joint position limits (radians, symmetric by default).
    pub joint_ranges: Option<[(f64, f64); 2]>,
    /// Pointmaze only.
    pub layout: Option<Layout>,
    pub episode_len: u32,
    pub goal: [f64; 2],
    pub workspace: f64,
    pub v_max: f64,
}

impl EnvParams {
    pub fn validate(&self) -> Result<(), EnvError> {
        let ok = self.dt > 0.0
            && self.gravity_g >= 0.0
            && self
                .action_clamp
                .iter()
                .all(|(lo, hi)| lo < hi && *lo >= -1.0 && *hi <= 1.0);
        if !ok {
            return Err(EnvError::NotSimulated(format!(
                "invalid parameters for {}",
                self.family.as_str()
            )));
        }
        if let Some(layout) = &self.layout {
            let start = layout.start_cell();
            let goal = layout.goal_cell();
            if layout.is_wall(start.0, start.1) || layout.is_wall(goal.0, goal.1) {
                return Err(EnvError::UnknownLayout(layout.name.clone()));
            }
        }
        Ok(())
    }
}

/// Forward kinematics of the two-link reacher.
pub fn reacher_fk(links: &[f64; 2], theta1: f64, theta2: f64) -> [f64; 2] {
    [
        links[0] * theta1.cos() + links[1] * (theta1 + theta2).cos(),
        links[0] * theta1.sin() + links[1] * (theta1 + theta2).sin(),
    ]
}

/// Source-domain (unshifted) parameters for a desk family.
pub fn base_env(family: EnvFamily) -> Result<EnvParams, EnvError> {
    let full_clamp = [(-1.0, 1.0); ACTION_DIM];
    let params = match family {
        EnvFamily::PointMass => EnvParams {
            family,
            dt: DT,
            mass: MASS,
            force_scale: FORCE_SCALE,
            friction_mu: BASE_FRICTION,
            gravity_g: BASE_GRAVITY,
            action_clamp: full_clamp,
            link_lengths: None,
            joint_ranges: None,
            layout: None,
            episode_len: EPISODE_LEN,
            // Start and goal sit on the floor so the task stays solvable at
            // every gravity level.
            goal: [3.5, -4.5],
            workspace: WORKSPACE_HALF_WIDTH,
            v_max: V_MAX,
        },
        EnvFamily::Reacher => {
            let links = [REACHER_LINK, REACHER_LINK];
            EnvParams {
                family,
                dt: DT,
                mass: MASS,
                force_scale: FORCE_SCALE,
                friction_mu: BASE_FRICTION,
                gravity_g: 0.0, // torque-controlled arm in the horizontal plane
                action_clamp: full_clamp,
                link_lengths: Some(links),
                joint_ranges: Some([
                    (-REACHER_JOINT_RANGE, REACHER_JOINT_RANGE),
                    (-REACHER_JOINT_RANGE, REACHER_JOINT_RANGE),
                ]),
                layout: None,
                episode_len: EPISODE_LEN,
                goal: reacher_fk(&links, REACHER_GOAL_ANGLES.0, REACHER_GOAL_ANGLES.1),
                workspace: WORKSPACE_HALF_WIDTH,
                v_max: V_MAX,
            }
        }
        EnvFamily::PointMaze => {
            let layout = crate::layouts::small_layout("empty")?;
            let goal = cell_center(&layout, layout.goal_cell());
            EnvParams {
                family,
                dt: DT,
                mass: MASS,
                force_scale: FORCE_SCALE,
                friction_mu: BASE_FRICTION,
                gravity_g: 0.0, // top-down maze
                action_clamp: full_clamp,
                link_lengths: None,
                joint_ranges: None,
                layout: Some(layout),
                episode_len: EPISODE_LEN,
                goal,
                workspace: WORKSPACE_HALF_WIDTH,
                v_max: V_MAX,
            }
        }
        other => return Err(EnvError::NotSimulated(other.as_str().to_owned())),
    };
    Ok(params)
}

/// Center of a layout cell in workspace coordinates.
pub fn cell_center(layout: &Layout, (row, col): (usize, usize)) -> [f64; 2] {
    let l = WORKSPACE_HALF_WIDTH;
    let cell_w = 2.0 * l / layout.cols() as f64;
    let cell_h = 2.0 * l / layout.rows() as f64;
    [
        -l + (col as f64 + 0.5) * cell_w,
        -l + (row as f64 + 0.5) * cell_h,
    ]
}

/// Cell containing a workspace position (clamped onto the grid).
pub fn cell_of(layout: &Layout, x: f64, y: f64) -> (usize, usize) {
    let l = WORKSPACE_HALF_WIDTH;
    let cell_w = 2.0 * l / layout.cols() as f64;
    let cell_h = 2.0 * l / layout.rows() as f64;
    let col = (((x + l) / cell_w).floor() as isize).clamp(0, layout.cols() as isize - 1);
    let row = (((y + l) / cell_h).floor() as isize).clamp(0, layout.rows() as isize - 1);
    (row as usize, col as usize)
}

/// Environment state: `(x, y, vx, vy)` for point families and
/// `(theta1, theta2, omega1, omega2)` for the reacher.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvState {
    pub q: [f64; STATE_DIM],
    pub step_count: u32,
}

impl EnvState {
    pub fn observation(&self) -> Vec<f64> {
        self.q.to_vec()
    }
}
