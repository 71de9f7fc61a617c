//! Target-domain parameter construction: one named shift applied to the
//! family's base parameters.

use crate::error::EnvError;
use crate::layouts::small_layout;
use crate::params::{base_env, cell_center, EnvParams, REACHER_JOINT_RANGE};
use offdyn_core::task::{Difficulty, EnvFamily, ShiftLevel, ShiftType, TaskId};

fn unsupported(id: &TaskId) -> EnvError {
    EnvError::ShiftNotSupportedForFamily {
        family: id.env_family,
        shift: id.shift_type.as_str().to_owned(),
    }
}

/// Builds the target-domain parameters for a desk-scale task. The source
/// domain is always [`base_env`] of the same family; source and target differ
/// only in the fields named by the shift type.
pub fn make_env(id: &TaskId) -> Result<EnvParams, EnvError> {
    if !id.env_family.is_desk() {
        return Err(EnvError::NotSimulated(id.to_string()));
    }
    let mut params = base_env(id.env_family)?;

    match (id.env_family, id.shift_type) {
        (EnvFamily::PointMass | EnvFamily::Reacher, ShiftType::Friction) => {
            let level = factor(id)?;
            params.friction_mu *= level;
        }
        (EnvFamily::PointMass, ShiftType::Gravity) => {
            let level = factor(id)?;
            params.gravity_g *= level;
        }
        (EnvFamily::PointMass, ShiftType::Kinematic) => {
            if id.shift_part.is_some() {
                return Err(unsupported(id));
            }
            let r = difficulty(id)?.ratio();
            params.action_clamp = [(-r, r), (-r, r)];
        }
        (EnvFamily::Reacher, ShiftType::Kinematic) => {
            let joint = match id.shift_part.as_deref() {
                Some("shoulder") => 0,
                Some("elbow") => 1,
                _ => return Err(unsupported(id)),
            };
            let r = difficulty(id)?.ratio();
            let mut ranges = params.joint_ranges.expect("reacher ranges");
            ranges[joint] = (-REACHER_JOINT_RANGE * r, REACHER_JOINT_RANGE * r);
            params.joint_ranges = Some(ranges);
        }
        (EnvFamily::PointMass, ShiftType::Morph) => {
            // A smaller body is a lighter one.
            params.mass *= difficulty(id)?.ratio();
        }
        (EnvFamily::Reacher, ShiftType::Morph) => {
            if id.shift_part.is_some() {
                return Err(unsupported(id));
            }
            let r = difficulty(id)?.ratio();
            let links = params.link_lengths.expect("reacher links");
            params.link_lengths = Some([links[0] * r, links[1] * r]);
        }
        (EnvFamily::PointMaze, ShiftType::Layout) => {
            let name = match &id.shift_level {
                ShiftLevel::Layout(name) => name.clone(),
                other => return Err(EnvError::UnknownLayout(other.to_string())),
            };
            let layout = small_layout(&name)?;
            // The goal position is part of the reward function and stays at
            // the source layout's goal cell (the top-right corner, which is
            // free in every registered layout).
            params.goal = cell_center(&layout, layout.goal_cell());
            params.layout = Some(layout);
        }
        _ => return Err(unsupported(id)),
    }
    params.validate()?;
    Ok(params)
}

/// Source-domain parameters for a task (the base family parameters).
pub fn make_source_env(id: &TaskId) -> Result<EnvParams, EnvError> {
    if !id.env_family.is_desk() {
        return Err(EnvError::NotSimulated(id.to_string()));
    }
    base_env(id.env_family)
}

fn factor(id: &TaskId) -> Result<f64, EnvError> {
    id.shift_level
        .as_factor()
        .ok_or_else(|| EnvError::UnknownTask(id.to_string()))
}

fn difficulty(id: &TaskId) -> Result<Difficulty, EnvError> {
    id.shift_level
        .as_difficulty()
        .ok_or_else(|| EnvError::UnknownTask(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use offdyn_core::task::parse_task_name;

    #[test]
    fn gravity_shift_is_multiplicative() {
        let id = parse_task_name("pointmass-gravity-2.0").unwrap();
        let p = make_env(&id).unwrap();
        assert!((p.gravity_g - 19.6).abs() < 1e-12);
    }

    #[test]
    fn identity_level_returns_base_params() {
        let id = parse_task_name("pointmass-gravity-1.0").unwrap();
        assert_eq!(make_env(&id).unwrap(), base_env(EnvFamily::PointMass).unwrap());
    }

    #[test]
    fn reacher_elbow_range_scales_to_half() {
        let id = parse_task_name("reacher-kinematic-elbow-medium").unwrap();
        let p = make_env(&id).unwrap();
        let ranges = p.joint_ranges.unwrap();
        assert!((ranges[1].1 - REACHER_JOINT_RANGE * 0.5).abs() < 1e-12);
        assert!((ranges[0].1 - REACHER_JOINT_RANGE).abs() < 1e-12);
    }

    #[test]
    fn layout_shift_on_pointmass_is_rejected() {
        let id = parse_task_name("pointmass-layout-empty").unwrap();
        assert!(matches!(
            make_env(&id),
            Err(EnvError::ShiftNotSupportedForFamily { .. })
        ));
    }

    #[test]
    fn shift_locality_only_named_fields_differ() {
        for (name, check) in [
            ("pointmass-friction-5.0", "friction"),
            ("pointmass-gravity-0.5", "gravity"),
            ("pointmass-kinematic-hard", "clamp"),
            ("pointmass-morph-medium", "mass"),
            ("reacher-friction-0.1", "friction"),
            ("reacher-kinematic-shoulder-easy", "ranges"),
            ("reacher-morph-hard", "links"),
        ] {
            let id = parse_task_name(name).unwrap();
            let src = make_source_env(&id).unwrap();
            let tar = make_env(&id).unwrap();
            assert_eq!(src.goal, tar.goal, "{name}: goal must be shared");
            assert_eq!(src.dt, tar.dt);
            assert_eq!(src.episode_len, tar.episode_len);
            match check {
                "friction" => {
                    assert_ne!(src.friction_mu, tar.friction_mu);
                    assert_eq!(src.gravity_g, tar.gravity_g);
                    assert_eq!(src.mass, tar.mass);
                    assert_eq!(src.action_clamp, tar.action_clamp);
                    assert_eq!(src.link_lengths, tar.link_lengths);
                    assert_eq!(src.joint_ranges, tar.joint_ranges);
                }
                "gravity" => {
                    assert_ne!(src.gravity_g, tar.gravity_g);
                    assert_eq!(src.friction_mu, tar.friction_mu);
                }
                "clamp" => {
                    assert_ne!(src.action_clamp, tar.action_clamp);
                    assert_eq!(src.friction_mu, tar.friction_mu);
                    assert_eq!(src.gravity_g, tar.gravity_g);
                }
                "mass" => {
                    assert_ne!(src.mass, tar.mass);
                    assert_eq!(src.friction_mu, tar.friction_mu);
                }
                "ranges" => {
                    assert_ne!(src.joint_ranges, tar.joint_ranges);
                    assert_eq!(src.link_lengths, tar.link_lengths);
                }
                "links" => {
                    assert_ne!(src.link_lengths, tar.link_lengths);
                    assert_eq!(src.joint_ranges, tar.joint_ranges);
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn kinematic_levels_are_strictly_nested() {
        let easy = make_env(&parse_task_name("pointmass-kinematic-easy").unwrap()).unwrap();
        let medium = make_env(&parse_task_name("pointmass-kinematic-medium").unwrap()).unwrap();
        let hard = make_env(&parse_task_name("pointmass-kinematic-hard").unwrap()).unwrap();
        for i in 0..2 {
            assert!(hard.action_clamp[i].1 < medium.action_clamp[i].1);
            assert!(medium.action_clamp[i].1 < easy.action_clamp[i].1);
            assert!(hard.action_clamp[i].0 > medium.action_clamp[i].0);
        }
    }

    #[test]
    fn maze_layout_shift_swaps_the_layout() {
        let id = parse_task_name("pointmaze-layout-zshape").unwrap();
        let p = make_env(&id).unwrap();
        assert_eq!(p.layout.as_ref().unwrap().name, "zshape");
    }
}
