//! MuJoCo XML fragment emission for the benchmark task variants.
//!
//! For each task name the emitter produces the mutated model elements as an
//! XML fragment file: friction and gravity values come from exact decimal
//! arithmetic on the stock Gym model values, joint-range and geometry edits
//! come from fixed per-task tables, Adroit broken-joint ranges are scaled
//! exactly in micro-radian units, and maze variants carry their occupancy
//! grid as block geoms. Output is pure: the same task always yields
//! byte-identical text.

use crate::error::EnvError;
use crate::layouts::{large_layout, medium_layout, small_layout, Layout};
use offdyn_core::task::{
    all_task_names, format_task_name, parse_task_name, Difficulty, EnvFamily, ShiftLevel,
    ShiftType, TaskId,
};

/// Emits `(filename, contents)` pairs for a MuJoCo-family task.
pub fn emit_mujoco_xml(id: &TaskId) -> Result<Vec<(String, String)>, EnvError> {
    let name = format_task_name(id);
    if !all_task_names().contains(&name) && !is_identity_factor(id) {
        return Err(EnvError::UnknownTask(name));
    }
    let body = match (id.env_family, id.shift_type) {
        (EnvFamily::AntMaze, ShiftType::Layout) => maze_xml(id)?,
        (_, ShiftType::Friction) => friction_xml(id.env_family, factor_tenths(id)?)?,
        (_, ShiftType::Gravity) => gravity_xml(id.env_family, factor_tenths(id)?)?,
        (_, ShiftType::Kinematic) => kinematic_xml(id)?,
        (_, ShiftType::Morph) => morph_xml(id)?,
        (_, ShiftType::BrokenJoint) => broken_joint_xml(difficulty(id)?),
        (_, ShiftType::ShrinkFinger) => shrink_finger_xml(difficulty(id)?)
            .iter()
            .map(|s| s.to_string())
            .collect(),
        _ => return Err(EnvError::UnknownTask(name)),
    };
    let mut text = body.join("\n");
    text.push('\n');
    Ok(vec![(format!("{name}.xml"), text)])
}

fn is_identity_factor(id: &TaskId) -> bool {
    matches!(id.shift_type, ShiftType::Friction | ShiftType::Gravity)
        && id.shift_level.as_factor() == Some(1.0)
}

fn difficulty(id: &TaskId) -> Result<Difficulty, EnvError> {
    id.shift_level
        .as_difficulty()
        .ok_or_else(|| EnvError::UnknownTask(id.to_string()))
}

/// Factor levels in tenths (0.1 -> 1) for exact decimal products.
fn factor_tenths(id: &TaskId) -> Result<i64, EnvError> {
    match id.shift_level.as_factor() {
        Some(f) => Ok((f * 10.0).round() as i64),
        None => Err(EnvError::UnknownTask(id.to_string())),
    }
}

/// Formats a value given in hundredths, keeping at least one decimal digit:
/// 1000 -> "10.0", 450 -> "4.5", 9 -> "0.09".
fn format_hundredths(n: i64) -> String {
    let sign = if n < 0 { "-" } else { "" };
    let n = n.abs();
    let int = n / 100;
    let frac = n % 100;
    if frac == 0 {
        format!("{sign}{int}.0")
    } else if frac % 10 == 0 {
        format!("{sign}{int}.{}", frac / 10)
    } else {
        format!("{sign}{int}.{frac:02}")
    }
}

/// Formats a value given in millionths, trimming trailing zeros:
/// 785500 -> "0.7855", -218000 -> "-0.218".
fn format_millionths(n: i64) -> String {
    let sign = if n < 0 { "-" } else { "" };
    let n = n.abs();
    let int = n / 1_000_000;
    let mut frac = format!("{:06}", n % 1_000_000);
    while frac.ends_with('0') {
        frac.pop();
    }
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

// ---------------------------------------------------------------------------
// Friction: multiply every friction component of the stock model geoms.
// ---------------------------------------------------------------------------

fn friction_xml(family: EnvFamily, level_tenths: i64) -> Result<Vec<String>, EnvError> {
    // (base friction in tenths, line template with `{f}` placeholder)
    let geoms: &[(i64, &str)] = match family {
        EnvFamily::Hopper => &[
            (9, r#"<geom friction="{f}" fromto="0 0 1.45 0 0 1.05" name="torso_geom" size="0.05" type="capsule"/>"#),
            (9, r#"<geom friction="{f}" fromto="0 0 1.05 0 0 0.6" name="thigh_geom" size="0.05" type="capsule"/>"#),
            (9, r#"<geom friction="{f}" fromto="0 0 0.6 0 0 0.1" name="leg_geom" size="0.04" type="capsule"/>"#),
            (20, r#"<geom friction="{f}" fromto="-0.13 0 0.1 0.26 0 0.1" name="foot_geom" size="0.06" type="capsule"/>"#),
        ],
        EnvFamily::Walker2d => &[
            (9, r#"<geom friction="{f}" fromto="0 0 1.45 0 0 1.05" name="torso_geom" size="0.05" type="capsule"/>"#),
            (9, r#"<geom friction="{f}" fromto="0 0 1.05 0 0 0.6" name="thigh_geom" size="0.05" type="capsule"/>"#),
            (9, r#"<geom friction="{f}" fromto="0 0 0.6 0 0 0.1" name="leg_geom" size="0.04" type="capsule"/>"#),
            (19, r#"<geom friction="{f}" fromto="-0.0 0 0.1 0.2 0 0.1" name="foot_geom" size="0.06" type="capsule"/>"#),
            (9, r#"<geom friction="{f}" fromto="0 0 1.05 0 0 0.6" name="thigh_left_geom" rgba=".7 .3 .6 1" size="0.05" type="capsule"/>"#),
            (9, r#"<geom friction="{f}" fromto="0 0 0.6 0 0 0.1" name="leg_left_geom" rgba=".7 .3 .6 1" size="0.04" type="capsule"/>"#),
            (19, r#"<geom friction="{f}" fromto="-0.0 0 0.1 0.2 0 0.1" name="foot_left_geom" rgba=".7 .3 .6 1" size="0.06" type="capsule"/>"#),
        ],
        EnvFamily::Ant => {
            // Stock ant sets friction on the default geom: "1 0.5 0.5".
            let f = friction_triple(&[10, 5, 5], level_tenths);
            return Ok(vec![format!(
                r#"<geom conaffinity="0" condim="3" density="5.0" friction="{f}" margin="0.01" rgba="0.8 0.6 0.4 1"/>"#
            )]);
        }
        EnvFamily::HalfCheetah => {
            // Stock halfcheetah default geom friction: ".4 .1 .1".
            let f = friction_triple(&[4, 1, 1], level_tenths);
            return Ok(vec![format!(
                r#"<geom conaffinity="0" condim="3" contype="1" friction="{f}" rgba="0.8 0.6 .4 1" solimp="0.0 0.8 0.01" solref="0.02 1"/>"#
            )]);
        }
        other => {
            return Err(EnvError::ShiftNotSupportedForFamily {
                family: other,
                shift: "friction".into(),
            })
        }
    };
    Ok(geoms
        .iter()
        .map(|(base_tenths, template)| {
            template.replace("{f}", &format_hundredths(base_tenths * level_tenths))
        })
        .collect())
}

fn friction_triple(base_tenths: &[i64; 3], level_tenths: i64) -> String {
    base_tenths
        .iter()
        .map(|b| format_hundredths(b * level_tenths))
        .collect::<Vec<_>>()
        .join(" ")
}

// ---------------------------------------------------------------------------
// Gravity: scale "0 0 -9.81" exactly.
// ---------------------------------------------------------------------------

fn gravity_xml(family: EnvFamily, level_tenths: i64) -> Result<Vec<String>, EnvError> {
    // 9.81 m/s^2 in millionths; exact product with the level.
    let g = format_millionths(9_810_000 * level_tenths / 10);
    let line = match family {
        EnvFamily::HalfCheetah => format!(r#"<option gravity="0 0 -{g}" timestep="0.01"/>"#),
        EnvFamily::Ant => {
            format!(r#"<option gravity="0 0 -{g}" integrator="RK4" timestep="0.01"/>"#)
        }
        EnvFamily::Hopper => {
            format!(r#"<option gravity="0 0 -{g}" integrator="RK4" timestep="0.002"/>"#)
        }
        EnvFamily::Walker2d => format!(r#"<option gravity="0 0 -{g}" timestep="0.002"/>"#),
        other => {
            return Err(EnvError::ShiftNotSupportedForFamily {
                family: other,
                shift: "gravity".into(),
            })
        }
    };
    Ok(vec![line])
}

// ---------------------------------------------------------------------------
// Kinematic: joint-range tables per (family, part, level).
// ---------------------------------------------------------------------------

fn kinematic_xml(id: &TaskId) -> Result<Vec<String>, EnvError> {
    let level = difficulty(id)?;
    let li = level as usize; // easy = 0, medium = 1, hard = 2
    let part = id.shift_part.as_deref().unwrap_or("");
    let lines: Vec<String> = match (id.env_family, part) {
        (EnvFamily::Ant, "hipjnt") => {
            let r = ["-24 24", "-15 15", "-6 6"][li];
            (1..=4)
                .map(|i| format!(r#"<joint axis="0 0 1" name="hip_{i}" pos="0.0 0.0 0.0" range="{r}" type="hinge"/>"#))
                .collect()
        }
        (EnvFamily::Ant, "anklejnt") => {
            let hi = ["62", "50", "38"][li];
            vec![
                format!(r#"<joint axis="-1 1 0" name="ankle_1" pos="0.0 0.0 0.0" range="30 {hi}" type="hinge"/>"#),
                format!(r#"<joint axis="1 1 0" name="ankle_2" pos="0.0 0.0 0.0" range="-{hi} -30" type="hinge"/>"#),
                format!(r#"<joint axis="-1 1 0" name="ankle_3" pos="0.0 0.0 0.0" range="-{hi} -30" type="hinge"/>"#),
                format!(r#"<joint axis="1 1 0" name="ankle_4" pos="0.0 0.0 0.0" range="30 {hi}" type="hinge"/>"#),
            ]
        }
        (EnvFamily::HalfCheetah, "footjnt") => {
            let (b, f) = [("-.32 .628", "-.4 .4"), ("-.2 .3925", "-.25 .25"), ("-.08 .157", "-.1 .1")][li];
            vec![
                format!(r#"<joint axis="0 1 0" damping="3" name="bfoot" pos="0 0 0" range="{b}" stiffness="120" type="hinge"/>"#),
                format!(r#"<joint axis="0 1 0" damping="1.5" name="ffoot" pos="0 0 0" range="{f}" stiffness="60" type="hinge"/>"#),
            ]
        }
        (EnvFamily::HalfCheetah, "thighjnt") => {
            let (b, f) = [("-.416 .84", "-.8 .56"), ("-.26 .525", "-.5 .35"), ("-.104 .21", "-.2 .14")][li];
            vec![
                format!(r#"<joint axis="0 1 0" damping="6" name="bthigh" pos="0 0 0" range="{b}" stiffness="240" type="hinge"/>"#),
                format!(r#"<joint axis="0 1 0" damping="4.5" name="fthigh" pos="0 0 0" range="{f}" stiffness="180" type="hinge"/>"#),
            ]
        }
        (EnvFamily::Hopper, "footjnt") => {
            let r = ["-36 36", "-22.5 22.5", "-9 9"][li];
            vec![format!(r#"<joint axis="0 -1 0" name="foot_joint" pos="0 0 0.1" range="{r}" type="hinge"/>"#)]
        }
        (EnvFamily::Hopper, "legjnt") => {
            let r = ["-120 0", "-75 0", "-30 0"][li];
            vec![format!(r#"<joint axis="0 -1 0" name="leg_joint" pos="0 0 0.6" range="{r}" type="hinge"/>"#)]
        }
        (EnvFamily::Walker2d, "footjnt") => {
            let r = ["-36 36", "-22.5 22.5", "-9 9"][li];
            vec![
                format!(r#"<joint axis="0 -1 0" name="foot_joint" pos="0 0 0.1" range="{r}" type="hinge"/>"#),
                format!(r#"<joint axis="0 -1 0" name="foot_left_joint" pos="0 0 0.1" range="{r}" type="hinge"/>"#),
            ]
        }
        (EnvFamily::Walker2d, "thighjnt") => {
            let r = ["-120 0", "-75 0", "-30 0"][li];
            vec![
                format!(r#"<joint axis="0 -1 0" name="thigh_joint" pos="0 0 1.05" range="{r}" type="hinge"/>"#),
                format!(r#"<joint axis="0 -1 0" name="thigh_left_joint" pos="0 0 1.05" range="{r}" type="hinge"/>"#),
            ]
        }
        _ => return Err(EnvError::UnknownTask(id.to_string())),
    };
    Ok(lines)
}

// ---------------------------------------------------------------------------
// Morphology: geometry edit tables per (family, part, level).
// ---------------------------------------------------------------------------

fn morph_xml(id: &TaskId) -> Result<Vec<String>, EnvError> {
    let li = difficulty(id)? as usize;
    let part = id.shift_part.as_deref().unwrap_or("");
    let lines: Vec<String> = match (id.env_family, part) {
        (EnvFamily::Ant, "halflegs") => {
            let v = ["0.32", "0.2", "0.08"][li];
            vec![
                format!(r#"<geom fromto="0.0 0.0 0.0 {v} {v} 0.0" name="left_ankle_geom" size="0.08" type="capsule"/>"#),
                format!(r#"<geom fromto="0.0 0.0 0.0 -{v} {v} 0.0" name="right_ankle_geom" size="0.08" type="capsule"/>"#),
            ]
        }
        (EnvFamily::Ant, "alllegs") => {
            let v = ["0.32", "0.2", "0.08"][li];
            vec![
                format!(r#"<geom fromto="0.0 0.0 0.0 {v} {v} 0.0" name="left_ankle_geom" size="0.08" type="capsule"/>"#),
                format!(r#"<geom fromto="0.0 0.0 0.0 -{v} {v} 0.0" name="right_ankle_geom" size="0.08" type="capsule"/>"#),
                format!(r#"<geom fromto="0.0 0.0 0.0 -{v} -{v} 0.0" name="third_ankle_geom" size="0.08" type="capsule"/>"#),
                format!(r#"<geom fromto="0.0 0.0 0.0 {v} -{v} 0.0" name="fourth_ankle_geom" size="0.08" type="capsule"/>"#),
            ]
        }
        (EnvFamily::HalfCheetah, "thigh") => {
            let (b1, b2, f1, f2) = [
                ("0.11 0 -0.11", "0.11 0 -0.11", "-0.09 0 -0.1", "-0.09 0 -0.1"),
                ("0.08 0 -0.08", "0.08 0 -0.08", "-0.07 0 -0.08", "-0.07 0 -0.08"),
                ("0.02 0 -0.02", "0.02 0 -0.02", "-0.04 0 -0.05", "-0.04 0 -0.05"),
            ][li];
            vec![
                format!(r#"<geom fromto="0 0 0 {b1}" name="bthigh" size="0.046" type="capsule"/>"#),
                format!(r#"<body name="bshin" pos="{b2}">"#),
                r#"<geom fromto="0 0 0 -.13 0 -.15" name="bshin" rgba="0.9 0.6 0.6 1" size="0.046" type="capsule"/>"#.to_string(),
                r#"<body name="bfoot" pos="-.13 0 -.15">"#.to_string(),
                format!(r#"<geom fromto="0 0 0 {f1}" name="fthigh" size="0.046" type="capsule"/>"#),
                format!(r#"<body name="fshin" pos="{f2}">"#),
                r#"<geom fromto="0 0 0 .11 0 -.13" name="fshin" rgba="0.9 0.6 0.6 1" size="0.046" type="capsule"/>"#.to_string(),
                r#"<body name="ffoot" pos=".11 0 -.13">"#.to_string(),
            ]
        }
        (EnvFamily::HalfCheetah, "torso") => {
            let (ft, head, bpos, fpos) = [
                ("-.4 0 0 .4 0 0", ".5 0 .1", "-.4 0 0", ".4 0 0"),
                ("-.25 0 0 .25 0 0", ".35 0 .1", "-.25 0 0", ".25 0 0"),
                ("-.1 0 0 .1 0 0", ".2 0 .1", "-.1 0 0", ".1 0 0"),
            ][li];
            vec![
                format!(r#"<geom fromto="{ft}" name="torso" size="0.046" type="capsule"/>"#),
                format!(r#"<geom axisangle="0 1 0 .87" name="head" pos="{head}" size="0.046 .15" type="capsule"/>"#),
                format!(r#"<body name="bthigh" pos="{bpos}">"#),
                format!(r#"<body name="fthigh" pos="{fpos}">"#),
            ]
        }
        (EnvFamily::Hopper, "foot") => {
            let (ft, size) = [
                ("-0.104 0 0.1 0.208 0 0.1", "0.048"),
                ("-0.078 0 0.1 0.156 0 0.1", "0.036"),
                ("-0.052 0 0.1 0.104 0 0.1", "0.024"),
            ][li];
            vec![format!(r#"<geom friction="2.0" fromto="{ft}" name="foot_geom" size="{size}" type="capsule"/>"#)]
        }
        (EnvFamily::Hopper | EnvFamily::Walker2d, "torso") => {
            let (top, size) = [("1.53", "0.075"), ("1.69", "0.1"), ("1.85", "0.125")][li];
            vec![format!(r#"<geom friction="0.9" fromto="0 0 {top} 0 0 1.05" name="torso_geom" size="{size}" type="capsule"/>"#)]
        }
        (EnvFamily::Walker2d, "leg") => {
            let knee = ["0.5", "0.35", "0.2"][li];
            vec![
                format!(r#"<geom friction="0.9" fromto="0 0 1.05 0 0 {knee}" name="thigh_geom" size="0.05" type="capsule"/>"#),
                format!(r#"<joint axis="0 -1 0" name="leg_joint" pos="0 0 {knee}" range="-150 0" type="hinge"/>"#),
                format!(r#"<geom friction="0.9" fromto="0 0 {knee} 0 0 0.1" name="leg_geom" size="0.04" type="capsule"/>"#),
                format!(r#"<geom friction="0.9" fromto="0 0 1.05 0 0 {knee}" name="thigh_left_geom" rgba=".7 .3 .6 1" size="0.05" type="capsule"/>"#),
                format!(r#"<joint axis="0 -1 0" name="leg_left_joint" pos="0 0 {knee}" range="-150 0" type="hinge"/>"#),
                format!(r#"<geom friction="0.9" fromto="0 0 {knee} 0 0 0.1" name="leg_left_geom" rgba=".7 .3 .6 1" size="0.04" type="capsule"/>"#),
            ]
        }
        _ => return Err(EnvError::UnknownTask(id.to_string())),
    };
    Ok(lines)
}

// ---------------------------------------------------------------------------
// Adroit broken-joint: exact scaling of the index-finger and thumb joint
// ranges in micro-radian units (easy 1/2, medium 1/4, hard 1/8).
// ---------------------------------------------------------------------------

struct HandJoint {
    name: &'static str,
    axis: &'static str,
    /// (lo, hi) base range in millionths of a radian.
    base: (i64, i64),
    user: u32,
}

const HAND_JOINTS: [HandJoint; 9] = [
    HandJoint { name: "FFJ3", axis: "0 1 0", base: (-436_000, 436_000), user: 1103 },
    HandJoint { name: "FFJ2", axis: "1 0 0", base: (0, 1_571_000), user: 1102 },
    HandJoint { name: "FFJ1", axis: "1 0 0", base: (0, 1_571_000), user: 1101 },
    HandJoint { name: "FFJ0", axis: "1 0 0", base: (0, 1_571_000), user: 1100 },
    HandJoint { name: "THJ4", axis: "0 0 -1", base: (-1_047_000, 1_047_000), user: 1121 },
    HandJoint { name: "THJ3", axis: "1 0 0", base: (0, 1_309_000), user: 1120 },
    HandJoint { name: "THJ2", axis: "1 0 0", base: (-262_000, 262_000), user: 1119 },
    HandJoint { name: "THJ1", axis: "0 1 0", base: (-524_000, 524_000), user: 1118 },
    HandJoint { name: "THJ0", axis: "0 1 0", base: (-1_570_000, 0), user: 1117 },
];

fn broken_joint_xml(level: Difficulty) -> Vec<String> {
    let divisor = match level {
        Difficulty::Easy => 2,
        Difficulty::Medium => 4,
        Difficulty::Hard => 8,
    };
    HAND_JOINTS
        .iter()
        .map(|j| {
            let lo = format_millionths(j.base.0 / divisor);
            let hi = format_millionths(j.base.1 / divisor);
            format!(
                r#"<joint name="{}" pos="0 0 0" axis="{}" range="{lo} {hi}" user="{}" />"#,
                j.name, j.axis, j.user
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Adroit shrink-finger: fixed phalange tables (1/2, 1/4, 1/8 sizes).
// ---------------------------------------------------------------------------

fn shrink_finger_xml(level: Difficulty) -> &'static [&'static str] {
    match level {
        Difficulty::Easy => SHRINK_FINGER_EASY,
        Difficulty::Medium => SHRINK_FINGER_MEDIUM,
        Difficulty::Hard => SHRINK_FINGER_HARD,
    }
}

const SHRINK_FINGER_EASY: &[&str] = &[
    r#"<inertial pos="0 0 0.0115" quat="0.707095 -0.00400054 0.00400054 0.707095" mass="0.014" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_ffproximal" class="DC_Hand" size="0.01 0.01125" pos="0 0 0.01125" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_ffproximal" size="0.009 0.004 0.006" pos="0 -.007 .011"/>"#,
    r#"<body name="ffmiddle" pos="0 0 0.0225">"#,
    r#"<inertial pos="0 0 0.0055" quat="0.707107 0 0 0.707107" mass="0.012" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_ffmiddle" class="DC_Hand" size="0.00805 0.00625" pos="0 0 0.00625" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_ffmiddle" size="0.009 0.002 0.0036" pos="0 -.007 .0065"/>"#,
    r#"<body name="ffdistal" pos="0 0 0.0125">"#,
    r#"<inertial pos="0 0 0.0075" quat="0.7071 -0.00300043 0.00300043 0.7071" mass="0.01" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_ffdistal" class="DC_Hand" size="0.00705 0.006" pos="0 0 0.006" type="capsule" condim="4" />"#,
    r#"<site name="S_fftip" pos="0 0 0.013" group="3" />"#,
    r#"<site name="Tch_fftip" class="D_Touch" pos="0 -0.004 0.009" />"#,
    r#"<inertial pos="0 0 0.0115" quat="0.707095 -0.00400054 0.00400054 0.707095" mass="0.014" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_mfproximal" class="DC_Hand" size="0.01 0.01125" pos="0 0 0.01125" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_mfproximal" size="0.009 0.004 0.006" pos="0 -.007 .022"/>"#,
    r#"<body name="mfmiddle" pos="0 0 0.0225">"#,
    r#"<inertial pos="0 0 0.006" quat="0.707107 0 0 0.707107" mass="0.012" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_mfmiddle" class="DC_Hand" size="0.00805 0.00625" pos="0 0 0.00625" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_mfmiddle" size="0.009 0.002 0.0035" pos="0 -.007 .0065"/>"#,
    r#"<body name="mfdistal" pos="0 0 0.0125">"#,
    r#"<inertial pos="0 0 0.0075" quat="0.7071 -0.00300043 0.00300043 0.7071" mass="0.01" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_mfdistal" class="DC_Hand" size="0.00705 0.006" pos="0 0 0.006" type="capsule" condim="4" />"#,
    r#"<site name="S_mftip" pos="0 0 0.013" group="3" />"#,
    r#"<site name="Tch_mftip" class="D_Touch" pos="0 -0.004 0.009" />"#,
    r#"<inertial pos="0 0 0.0115" quat="0.707095 -0.00400054 0.00400054 0.707095" mass="0.014" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_rfproximal" class="DC_Hand" size="0.01 0.01125" pos="0 0 0.01125" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_rfproximal" size="0.009 0.004 0.006" pos="0 -.007 .011"/>"#,
    r#"<body name="rfmiddle" pos="0 0 0.0225">"#,
    r#"<inertial pos="0 0 0.006" quat="0.707107 0 0 0.707107" mass="0.012" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_rfmiddle" class="DC_Hand" size="0.00805 0.00625" pos="0 0 0.00625" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_rfmiddle" size="0.009 0.002 0.0035" pos="0 -.007 .0065"/>"#,
    r#"<body name="rfdistal" pos="0 0 0.0125">"#,
    r#"<inertial pos="0 0 0.0075" quat="0.7071 -0.00300043 0.00300043 0.7071" mass="0.01" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="V_rfdistal" class="D_Vizual" pos="0 0 0.0005" mesh="F1" />"#,
    r#"<geom name="C_rfdistal" class="DC_Hand" size="0.00705 0.006" pos="0 0 0.006" type="capsule" condim="4" />"#,
    r#"<site name="S_rftip" pos="0 0 0.013" group="3" />"#,
    r#"<site name="Tch_rftip" class="D_Touch" pos="0 -0.004 0.009" />"#,
    r#"<body name="lfknuckle" pos="-0.017 0 0.022">"#,
    r#"<inertial pos="0 0 0.0115" quat="0.707095 -0.00400054 0.00400054 0.707095" mass="0.014" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_lfproximal" class="DC_Hand" size="0.01 0.01125" pos="0 0 0.01125" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_lfproximal" size="0.009 0.004 0.006" pos="0 -.007 .011"/>"#,
    r#"<body name="lfmiddle" pos="0 0 0.0225">"#,
    r#"<inertial pos="0 0 0.006" quat="0.707107 0 0 0.707107" mass="0.012" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_lfmiddle" class="DC_Hand" size="0.00805 0.00625" pos="0 0 0.00625" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_lfmiddle" size="0.009 0.002 0.0035" pos="0 -.007 .0065"/>"#,
    r#"<body name="lfdistal" pos="0 0 0.0125">"#,
    r#"<inertial pos="0 0 0.0075" quat="0.7071 -0.00300043 0.00300043 0.7071" mass="0.01" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="V_lfdistal" class="D_Vizual" pos="0 0 0.0005" mesh="F1" />"#,
    r#"<geom name="C_lfdistal" class="DC_Hand" size="0.00705 0.006" pos="0 0 0.006" type="capsule" condim="4" />"#,
    r#"<site name="S_lftip" pos="0 0 0.013" group="3" />"#,
    r#"<site name="Tch_lftip" class="D_Touch" pos="0 -0.004 0.009" />"#,
];

const SHRINK_FINGER_MEDIUM: &[&str] = &[
    r#"<inertial pos="0 0 0.00575" quat="0.707095 -0.00400054 0.00400054 0.707095" mass="0.014" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_ffproximal" class="DC_Hand" size="0.01 0.005625" pos="0 0 0.005625" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_ffproximal" size="0.009 0.004 0.003" pos="0 -.007 .0055"/>"#,
    r#"<body name="ffmiddle" pos="0 0 0.01125">"#,
    r#"<inertial pos="0 0 0.00275" quat="0.707107 0 0 0.707107" mass="0.012" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_ffmiddle" class="DC_Hand" size="0.00805 0.003125" pos="0 0 0.003125" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_ffmiddle" size="0.009 0.002 0.0018" pos="0 -.007 .00325"/>"#,
    r#"<body name="ffdistal" pos="0 0 0.00625">"#,
    r#"<inertial pos="0 0 0.00375" quat="0.7071 -0.00300043 0.00300043 0.7071" mass="0.01" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_ffdistal" class="DC_Hand" size="0.00705 0.003" pos="0 0 0.003" type="capsule" condim="4" />"#,
    r#"<site name="S_fftip" pos="0 0 0.0065" group="3" />"#,
    r#"<site name="Tch_fftip" class="D_Touch" pos="0 -0.004 0.0045" />"#,
    r#"<inertial pos="0 0 0.00575" quat="0.707095 -0.00400054 0.00400054 0.707095" mass="0.014" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_mfproximal" class="DC_Hand" size="0.01 0.005625" pos="0 0 0.005625" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_mfproximal" size="0.009 0.004 0.003" pos="0 -.007 .022"/>"#,
    r#"<body name="mfmiddle" pos="0 0 0.01125">"#,
    r#"<inertial pos="0 0 0.003" quat="0.707107 0 0 0.707107" mass="0.012" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_mfmiddle" class="DC_Hand" size="0.00805 0.003125" pos="0 0 0.003125" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_mfmiddle" size="0.009 0.002 0.00175" pos="0 -.007 .00325"/>"#,
    r#"<body name="mfdistal" pos="0 0 0.00625">"#,
    r#"<inertial pos="0 0 0.00375" quat="0.7071 -0.00300043 0.00300043 0.7071" mass="0.01" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_mfdistal" class="DC_Hand" size="0.00705 0.003" pos="0 0 0.003" type="capsule" condim="4" />"#,
    r#"<site name="S_mftip" pos="0 0 0.0065" group="3" />"#,
    r#"<site name="Tch_mftip" class="D_Touch" pos="0 -0.004 0.0045" />"#,
    r#"<inertial pos="0 0 0.00575" quat="0.707095 -0.00400054 0.00400054 0.707095" mass="0.014" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_rfproximal" class="DC_Hand" size="0.01 0.005625" pos="0 0 0.005625" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_rfproximal" size="0.009 0.004 0.003" pos="0 -.007 .0055"/>"#,
    r#"<body name="rfmiddle" pos="0 0 0.01125">"#,
    r#"<inertial pos="0 0 0.003" quat="0.707107 0 0 0.707107" mass="0.012" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_rfmiddle" class="DC_Hand" size="0.00805 0.003125" pos="0 0 0.003125" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_rfmiddle" size="0.009 0.002 0.00175" pos="0 -.007 .00325"/>"#,
    r#"<body name="rfdistal" pos="0 0 0.00625">"#,
    r#"<inertial pos="0 0 0.00375" quat="0.7071 -0.00300043 0.00300043 0.7071" mass="0.01" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="V_rfdistal" class="D_Vizual" pos="0 0 0.00025" mesh="F1" />"#,
    r#"<geom name="C_rfdistal" class="DC_Hand" size="0.00705 0.003" pos="0 0 0.003" type="capsule" condim="4" />"#,
    r#"<site name="S_rftip" pos="0 0 0.0065" group="3" />"#,
    r#"<site name="Tch_rftip" class="D_Touch" pos="0 -0.004 0.0045" />"#,
    r#"<body name="lfknuckle" pos="-0.017 0 0.011">"#,
    r#"<inertial pos="0 0 0.00575" quat="0.707095 -0.00400054 0.00400054 0.707095" mass="0.014" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_lfproximal" class="DC_Hand" size="0.01 0.005625" pos="0 0 0.005625" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_lfproximal" size="0.009 0.004 0.003" pos="0 -.007 .0055"/>"#,
    r#"<body name="lfmiddle" pos="0 0 0.01125">"#,
    r#"<inertial pos="0 0 0.003" quat="0.707107 0 0 0.707107" mass="0.012" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_lfmiddle" class="DC_Hand" size="0.00805 0.003125" pos="0 0 0.003125" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_lfmiddle" size="0.009 0.002 0.00175" pos="0 -.007 .00325"/>"#,
    r#"<body name="lfdistal" pos="0 0 0.00625">"#,
    r#"<inertial pos="0 0 0.00375" quat="0.7071 -0.00300043 0.00300043 0.7071" mass="0.01" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="V_lfdistal" class="D_Vizual" pos="0 0 0.00025" mesh="F1" />"#,
    r#"<geom name="C_lfdistal" class="DC_Hand" size="0.00705 0.003" pos="0 0 0.003" type="capsule" condim="4" />"#,
    r#"<site name="S_lftip" pos="0 0 0.0065" group="3" />"#,
    r#"<site name="Tch_lftip" class="D_Touch" pos="0 -0.004 0.0045" />"#,
];

const SHRINK_FINGER_HARD: &[&str] = &[
    r#"<inertial pos="0 0 0.002875" quat="0.707095 -0.00400054 0.00400054 0.707095" mass="0.014" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_ffproximal" class="DC_Hand" size="0.01 0.0028125" pos="0 0 0.0028125" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_ffproximal" size="0.009 0.004 0.0015" pos="0 -.007 .00275"/>"#,
    r#"<body name="ffmiddle" pos="0 0 0.005625">"#,
    r#"<inertial pos="0 0 0.001375" quat="0.707107 0 0 0.707107" mass="0.012" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_ffmiddle" class="DC_Hand" size="0.00805 0.0015625" pos="0 0 0.0015625" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_ffmiddle" size="0.009 0.002 0.0009" pos="0 -.007 .001625"/>"#,
    r#"<body name="ffdistal" pos="0 0 0.003125">"#,
    r#"<inertial pos="0 0 0.001875" quat="0.7071 -0.00300043 0.00300043 0.7071" mass="0.01" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_ffdistal" class="DC_Hand" size="0.00705 0.0015" pos="0 0 0.0015" type="capsule" condim="4" />"#,
    r#"<site name="S_fftip" pos="0 0 0.00325" group="3" />"#,
    r#"<site name="Tch_fftip" class="D_Touch" pos="0 -0.004 0.00225" />"#,
    r#"<inertial pos="0 0 0.002875" quat="0.707095 -0.00400054 0.00400054 0.707095" mass="0.014" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_mfproximal" class="DC_Hand" size="0.01 0.0028125" pos="0 0 0.0028125" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_mfproximal" size="0.009 0.004 0.0015" pos="0 -.007 .022"/>"#,
    r#"<body name="mfmiddle" pos="0 0 0.005625">"#,
    r#"<inertial pos="0 0 0.0015" quat="0.707107 0 0 0.707107" mass="0.012" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_mfmiddle" class="DC_Hand" size="0.00805 0.0015625" pos="0 0 0.0015625" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_mfmiddle" size="0.009 0.002 0.000875" pos="0 -.007 .001625"/>"#,
    r#"<body name="mfdistal" pos="0 0 0.003125">"#,
    r#"<inertial pos="0 0 0.001875" quat="0.7071 -0.00300043 0.00300043 0.7071" mass="0.01" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_mfdistal" class="DC_Hand" size="0.00705 0.0015" pos="0 0 0.0015" type="capsule" condim="4" />"#,
    r#"<site name="S_mftip" pos="0 0 0.00325" group="3" />"#,
    r#"<site name="Tch_mftip" class="D_Touch" pos="0 -0.004 0.00225" />"#,
    r#"<inertial pos="0 0 0.002875" quat="0.707095 -0.00400054 0.00400054 0.707095" mass="0.014" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_rfproximal" class="DC_Hand" size="0.01 0.0028125" pos="0 0 0.0028125" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_rfproximal" size="0.009 0.004 0.0015" pos="0 -.007 .00275"/>"#,
    r#"<body name="rfmiddle" pos="0 0 0.005625">"#,
    r#"<inertial pos="0 0 0.0015" quat="0.707107 0 0 0.707107" mass="0.012" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_rfmiddle" class="DC_Hand" size="0.00805 0.0015625" pos="0 0 0.0015625" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_rfmiddle" size="0.009 0.002 0.000875" pos="0 -.007 .001625"/>"#,
    r#"<body name="rfdistal" pos="0 0 0.003125">"#,
    r#"<inertial pos="0 0 0.001875" quat="0.7071 -0.00300043 0.00300043 0.7071" mass="0.01" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="V_rfdistal" class="D_Vizual" pos="0 0 0.000125" mesh="F1" />"#,
    r#"<geom name="C_rfdistal" class="DC_Hand" size="0.00705 0.0015" pos="0 0 0.0015" type="capsule" condim="4" />"#,
    r#"<site name="S_rftip" pos="0 0 0.00325" group="3" />"#,
    r#"<site name="Tch_rftip" class="D_Touch" pos="0 -0.004 0.00225" />"#,
    r#"<body name="lfknuckle" pos="-0.017 0 0.0055">"#,
    r#"<inertial pos="0 0 0.002875" quat="0.707095 -0.00400054 0.00400054 0.707095" mass="0.014" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_lfproximal" class="DC_Hand" size="0.01 0.0028125" pos="0 0 0.0028125" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_lfproximal" size="0.009 0.004 0.0015" pos="0 -.007 .00275"/>"#,
    r#"<body name="lfmiddle" pos="0 0 0.005625">"#,
    r#"<inertial pos="0 0 0.0015" quat="0.707107 0 0 0.707107" mass="0.012" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="C_lfmiddle" class="DC_Hand" size="0.00805 0.0015625" pos="0 0 0.0015625" type="capsule" />"#,
    r#"<site class="D_Touch" name="Tch_lfmiddle" size="0.009 0.002 0.000875" pos="0 -.007 .001625"/>"#,
    r#"<body name="lfdistal" pos="0 0 0.03125">"#,
    r#"<inertial pos="0 0 0.001875" quat="0.7071 -0.00300043 0.00300043 0.7071" mass="0.01" diaginertia="1e-05 1e-05 1e-05" />"#,
    r#"<geom name="V_lfdistal" class="D_Vizual" pos="0 0 0.000125" mesh="F1" />"#,
    r#"<geom name="C_lfdistal" class="DC_Hand" size="0.00705 0.0015" pos="0 0 0.0015" type="capsule" condim="4" />"#,
    r#"<site name="S_lftip" pos="0 0 0.00325" group="3" />"#,
    r#"<site name="Tch_lftip" class="D_Touch" pos="0 -0.004 0.00225" />"#,
];

// ---------------------------------------------------------------------------
// AntMaze layouts: occupancy grid rendered as block geoms.
// ---------------------------------------------------------------------------

fn maze_xml(id: &TaskId) -> Result<Vec<String>, EnvError> {
    let size = id.shift_part.as_deref().unwrap_or("small");
    let level = match &id.shift_level {
        ShiftLevel::Layout(l) => l.as_str(),
        other => return Err(EnvError::UnknownLayout(other.to_string())),
    };
    let layout = match size {
        "small" => small_layout(level)?,
        "medium" => medium_layout(level)?,
        "large" => large_layout(level)?,
        _ => return Err(EnvError::UnknownTask(id.to_string())),
    };
    Ok(render_maze(&layout))
}

fn render_maze(layout: &Layout) -> Vec<String> {
    let mut lines = Vec::new();
    lines.push(format!(
        "<!-- maze rows top to bottom ({} x {}); # wall, . free -->",
        layout.rows(),
        layout.cols()
    ));
    for row in layout.render() {
        lines.push(format!("<!-- {row} -->"));
    }
    lines.push(r#"<body name="maze" pos="0 0 0">"#.to_string());
    for row in 0..layout.rows() {
        for col in 0..layout.cols() {
            if layout.is_wall(row, col) {
                lines.push(format!(
                    r#"<geom name="block_{row}_{col}" type="box" pos="{col}.5 {row}.5 0.5" size="0.5 0.5 0.5" material="wall" contype="1" conaffinity="1"/>"#
                ));
            }
        }
    }
    lines.push("</body>".to_string());
    let (sr, sc) = layout.start_cell();
    let (gr, gc) = layout.goal_cell();
    lines.push(format!(
        r#"<site name="start" pos="{sc}.5 {sr}.5 0" size="0.2"/>"#
    ));
    lines.push(format!(
        r#"<site name="goal" pos="{gc}.5 {gr}.5 0" size="0.2"/>"#
    ));
    lines
}

/// Emits every MuJoCo-family task's fragments (used by the CLI `emit-xml`
/// command without an explicit task).
pub fn emit_all() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for name in all_task_names() {
        let id = parse_task_name(&name).expect("registry names parse");
        if id.env_family.is_desk() {
            continue;
        }
        out.extend(emit_mujoco_xml(&id).expect("registry tasks emit"));
    }
    out
}
