//! Task-name grammar and the benchmark task registry.
//!
//! Task names follow `[domain]-[shift_type]-[shift_part (optional)]-[shift_level]`,
//! e.g. `ant-friction-0.5` or `hopper-kinematic-footjnt-medium`. Maze tasks use
//! the size token in place of the shift type (`antmaze-small-empty`), which
//! parses to a layout shift with the size recorded as the shift part.

use crate::error::CoreError;
use serde::{Deserialize, Serialize};

/// Environment family. The first three are desk-scale simulated families;
/// the rest exist for task naming and XML emission only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvFamily {
    PointMass,
    Reacher,
    PointMaze,
    Ant,
    HalfCheetah,
    Hopper,
    Walker2d,
    AntMaze,
    Pen,
    Door,
    Relocate,
    Hammer,
}

impl EnvFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            EnvFamily::PointMass => "pointmass",
            EnvFamily::Reacher => "reacher",
            EnvFamily::PointMaze => "pointmaze",
            EnvFamily::Ant => "ant",
            EnvFamily::HalfCheetah => "halfcheetah",
            EnvFamily::Hopper => "hopper",
            EnvFamily::Walker2d => "walker2d",
            EnvFamily::AntMaze => "antmaze",
            EnvFamily::Pen => "pen",
            EnvFamily::Door => "door",
            EnvFamily::Relocate => "relocate",
            EnvFamily::Hammer => "hammer",
        }
    }

    fn from_str(s: &str) -> Option<Self> {
        Some(match s {
            "pointmass" => EnvFamily::PointMass,
            "reacher" => EnvFamily::Reacher,
            "pointmaze" => EnvFamily::PointMaze,
            "ant" => EnvFamily::Ant,
            "halfcheetah" => EnvFamily::HalfCheetah,
            "hopper" => EnvFamily::Hopper,
            "walker2d" => EnvFamily::Walker2d,
            "antmaze" => EnvFamily::AntMaze,
            "pen" => EnvFamily::Pen,
            "door" => EnvFamily::Door,
            "relocate" => EnvFamily::Relocate,
            "hammer" => EnvFamily::Hammer,
            _ => return None,
        })
    }

    /// Families with a runnable desk-scale simulation.
    pub fn is_desk(self) -> bool {
        matches!(
            self,
            EnvFamily::PointMass | EnvFamily::Reacher | EnvFamily::PointMaze
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftType {
    Friction,
    Gravity,
    Kinematic,
    Morph,
    Layout,
    BrokenJoint,
    ShrinkFinger,
}

impl ShiftType {
    pub fn as_str(self) -> &'static str {
        match self {
            ShiftType::Friction => "friction",
            ShiftType::Gravity => "gravity",
            ShiftType::Kinematic => "kinematic",
            ShiftType::Morph => "morph",
            ShiftType::Layout => "layout",
            ShiftType::BrokenJoint => "broken-joint",
            ShiftType::ShrinkFinger => "shrink-finger",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub fn as_str(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
        }
    }

    /// Ratio applied to joint ranges / body sizes for desk-scale kinematic and
    /// morphology shifts.
    pub fn ratio(self) -> f64 {
        match self {
            Difficulty::Easy => 0.8,
            Difficulty::Medium => 0.5,
            Difficulty::Hard => 0.2,
        }
    }
}

/// Shift level: a multiplicative factor (friction/gravity), a difficulty
/// (kinematic/morph/broken-joint/shrink-finger), or a layout name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShiftLevel {
    Factor(f64),
    Named(Difficulty),
    Layout(String),
}

impl ShiftLevel {
    pub fn as_factor(&self) -> Option<f64> {
        match self {
            ShiftLevel::Factor(f) => Some(*f),
            _ => None,
        }
    }

    pub fn as_difficulty(&self) -> Option<Difficulty> {
        match self {
            ShiftLevel::Named(d) => Some(*d),
            _ => None,
        }
    }
}

impl std::fmt::Display for ShiftLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ShiftLevel::Factor(v) => write!(f, "{v:.1}"),
            ShiftLevel::Named(d) => write!(f, "{}", d.as_str()),
            ShiftLevel::Layout(s) => write!(f, "{s}"),
        }
    }
}

/// Factors allowed for friction/gravity shifts. 1.0 is the identity level: it
/// parses and produces a target domain equal to the source domain.
pub const FACTOR_LEVELS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

/// Layout names shared by the small antmaze variants and the desk pointmaze.
pub const SMALL_MAZE_LAYOUTS: [&str; 6] = [
    "empty",
    "centerblock",
    "lshape",
    "zshape",
    "reversel",
    "reverseu",
];

pub const MAZE_SIZES: [&str; 3] = ["small", "medium", "large"];

/// A parsed benchmark task name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskId {
    pub env_family: EnvFamily,
    pub shift_type: ShiftType,
    pub shift_part: Option<String>,
    pub shift_level: ShiftLevel,
}

impl TaskId {
    pub fn new(
        env_family: EnvFamily,
        shift_type: ShiftType,
        shift_part: Option<&str>,
        shift_level: ShiftLevel,
    ) -> Self {
        TaskId {
            env_family,
            shift_type,
            shift_part: shift_part.map(str::to_owned),
            shift_level,
        }
    }
}

impl std::fmt::Display for TaskId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", format_task_name(self))
    }
}

/// Renders the canonical lowercase task name. Inverse of [`parse_task_name`].
pub fn format_task_name(id: &TaskId) -> String {
    let family = id.env_family.as_str();
    // Maze names carry the size where other names carry the shift type.
    if id.env_family == EnvFamily::AntMaze {
        let size = id.shift_part.as_deref().unwrap_or("small");
        return format!("{family}-{size}-{}", id.shift_level);
    }
    match &id.shift_part {
        Some(part) => format!("{family}-{}-{part}-{}", id.shift_type.as_str(), id.shift_level),
        None => format!("{family}-{}-{}", id.shift_type.as_str(), id.shift_level),
    }
}

fn parse_factor_level(token: &str) -> Result<ShiftLevel, CoreError> {
    let value: f64 = token
        .parse()
        .map_err(|_| CoreError::InvalidShiftLevel(token.to_owned()))?;
    // Canonical names print factors with one decimal, so demand that form.
    if FACTOR_LEVELS.contains(&value) && format!("{value:.1}") == token {
        Ok(ShiftLevel::Factor(value))
    } else {
        Err(CoreError::InvalidShiftLevel(token.to_owned()))
    }
}

fn parse_difficulty(token: &str) -> Result<ShiftLevel, CoreError> {
    match token {
        "easy" => Ok(ShiftLevel::Named(Difficulty::Easy)),
        "medium" => Ok(ShiftLevel::Named(Difficulty::Medium)),
        "hard" => Ok(ShiftLevel::Named(Difficulty::Hard)),
        _ => Err(CoreError::InvalidShiftLevel(token.to_owned())),
    }
}

fn parse_maze_layout(size: &str, token: &str) -> Result<ShiftLevel, CoreError> {
    let valid = match size {
        "small" => SMALL_MAZE_LAYOUTS.contains(&token),
        "medium" | "large" => matches!(token, "1" | "2" | "3" | "4" | "5" | "6"),
        _ => false,
    };
    if valid {
        Ok(ShiftLevel::Layout(token.to_owned()))
    } else {
        Err(CoreError::InvalidShiftLevel(token.to_owned()))
    }
}

/// Parses a hyphen-joined lowercase task name into a [`TaskId`].
pub fn parse_task_name(name: &str) -> Result<TaskId, CoreError> {
    let tokens: Vec<&str> = name.split('-').collect();
    if tokens.len() < 3 {
        return Err(CoreError::MalformedTaskName(name.to_owned()));
    }
    let family = EnvFamily::from_str(tokens[0])
        .ok_or_else(|| CoreError::UnknownFamily(tokens[0].to_owned()))?;

    if family == EnvFamily::AntMaze {
        let size = tokens[1];
        if !MAZE_SIZES.contains(&size) {
            return Err(CoreError::UnknownShiftType(size.to_owned()));
        }
        if tokens.len() != 3 {
            return Err(CoreError::MalformedTaskName(name.to_owned()));
        }
        let level = parse_maze_layout(size, tokens[2])?;
        return Ok(TaskId::new(family, ShiftType::Layout, Some(size), level));
    }

    // Two-token shift types first (broken-joint, shrink-finger).
    let (shift_type, rest) = match (tokens[1], tokens.get(2)) {
        ("broken", Some(&"joint")) => (ShiftType::BrokenJoint, &tokens[3..]),
        ("shrink", Some(&"finger")) => (ShiftType::ShrinkFinger, &tokens[3..]),
        ("friction", _) => (ShiftType::Friction, &tokens[2..]),
        ("gravity", _) => (ShiftType::Gravity, &tokens[2..]),
        ("kinematic", _) => (ShiftType::Kinematic, &tokens[2..]),
        ("morph", _) => (ShiftType::Morph, &tokens[2..]),
        ("layout", _) => (ShiftType::Layout, &tokens[2..]),
        _ => return Err(CoreError::UnknownShiftType(tokens[1].to_owned())),
    };

    let (part, level_token) = match rest {
        [level] => (None, *level),
        [part, level] => (Some(*part), *level),
        _ => return Err(CoreError::MalformedTaskName(name.to_owned())),
    };

    let level = match shift_type {
        ShiftType::Friction | ShiftType::Gravity => parse_factor_level(level_token)?,
        ShiftType::Kinematic
        | ShiftType::Morph
        | ShiftType::BrokenJoint
        | ShiftType::ShrinkFinger => parse_difficulty(level_token)?,
        ShiftType::Layout => {
            if SMALL_MAZE_LAYOUTS.contains(&level_token) {
                ShiftLevel::Layout(level_token.to_owned())
            } else {
                return Err(CoreError::InvalidShiftLevel(level_token.to_owned()));
            }
        }
    };

    Ok(TaskId::new(family, shift_type, part, level))
}

const DIFFICULTIES: [&str; 3] = ["easy", "medium", "hard"];
const FACTOR_NAMES: [&str; 4] = ["0.1", "0.5", "2.0", "5.0"];

/// Broken-joint / morphology part options per locomotion family.
fn locomotion_parts(family: EnvFamily) -> (&'static [&'static str], &'static [&'static str]) {
    match family {
        EnvFamily::Ant => (&["hipjnt", "anklejnt"], &["halflegs", "alllegs"]),
        EnvFamily::HalfCheetah => (&["footjnt", "thighjnt"], &["thigh", "torso"]),
        EnvFamily::Hopper => (&["footjnt", "legjnt"], &["foot", "torso"]),
        EnvFamily::Walker2d => (&["footjnt", "thighjnt"], &["leg", "torso"]),
        _ => (&[], &[]),
    }
}

/// Every supported task name: the MuJoCo/AntMaze/Adroit lists plus the
/// desk-scale analogs. Order is deterministic.
pub fn all_task_names() -> Vec<String> {
    let mut names = Vec::new();

    // Desk-scale analogs.
    for level in FACTOR_NAMES {
        names.push(format!("pointmass-friction-{level}"));
    }
    for level in ["0.1", "0.5", "1.0", "2.0", "5.0"] {
        names.push(format!("pointmass-gravity-{level}"));
    }
    for level in DIFFICULTIES {
        names.push(format!("pointmass-kinematic-{level}"));
    }
    for level in DIFFICULTIES {
        names.push(format!("pointmass-morph-{level}"));
    }
    for level in FACTOR_NAMES {
        names.push(format!("reacher-friction-{level}"));
    }
    for part in ["shoulder", "elbow"] {
        for level in DIFFICULTIES {
            names.push(format!("reacher-kinematic-{part}-{level}"));
        }
    }
    for level in DIFFICULTIES {
        names.push(format!("reacher-morph-{level}"));
    }
    for layout in SMALL_MAZE_LAYOUTS {
        names.push(format!("pointmaze-layout-{layout}"));
    }

    // Locomotion (friction, gravity, kinematic, morph).
    for family in [
        EnvFamily::Ant,
        EnvFamily::HalfCheetah,
        EnvFamily::Hopper,
        EnvFamily::Walker2d,
    ] {
        let name = family.as_str();
        for level in FACTOR_NAMES {
            names.push(format!("{name}-friction-{level}"));
        }
        for level in FACTOR_NAMES {
            names.push(format!("{name}-gravity-{level}"));
        }
        let (kin_parts, morph_parts) = locomotion_parts(family);
        for part in kin_parts {
            for level in DIFFICULTIES {
                names.push(format!("{name}-kinematic-{part}-{level}"));
            }
        }
        for part in morph_parts {
            for level in DIFFICULTIES {
                names.push(format!("{name}-morph-{part}-{level}"));
            }
        }
    }

    // AntMaze map layouts.
    for layout in SMALL_MAZE_LAYOUTS {
        names.push(format!("antmaze-small-{layout}"));
    }
    for size in ["medium", "large"] {
        for idx in 1..=6 {
            names.push(format!("antmaze-{size}-{idx}"));
        }
    }

    // Adroit manipulation.
    for family in ["pen", "door", "relocate", "hammer"] {
        for level in DIFFICULTIES {
            names.push(format!("{family}-broken-joint-{level}"));
        }
        for level in DIFFICULTIES {
            names.push(format!("{family}-shrink-finger-{level}"));
        }
    }

    names
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_paper_examples() {
        let id = parse_task_name("ant-friction-0.5").unwrap();
        assert_eq!(id.env_family, EnvFamily::Ant);
        assert_eq!(id.shift_type, ShiftType::Friction);
        assert_eq!(id.shift_part, None);
        assert_eq!(id.shift_level, ShiftLevel::Factor(0.5));

        let id = parse_task_name("hopper-kinematic-footjnt-medium").unwrap();
        assert_eq!(id.env_family, EnvFamily::Hopper);
        assert_eq!(id.shift_type, ShiftType::Kinematic);
        assert_eq!(id.shift_part.as_deref(), Some("footjnt"));
        assert_eq!(id.shift_level, ShiftLevel::Named(Difficulty::Medium));
    }

    #[test]
    fn rejects_unknown_tokens() {
        assert_eq!(
            parse_task_name("ant-warp-1.0"),
            Err(CoreError::UnknownShiftType("warp".into()))
        );
        assert_eq!(
            parse_task_name("antelope-friction-0.5"),
            Err(CoreError::UnknownFamily("antelope".into()))
        );
        assert_eq!(
            parse_task_name("ant-friction-0.3"),
            Err(CoreError::InvalidShiftLevel("0.3".into()))
        );
        assert_eq!(
            parse_task_name("ant-kinematic-hipjnt-extreme"),
            Err(CoreError::InvalidShiftLevel("extreme".into()))
        );
    }

    #[test]
    fn formats_paper_examples() {
        let id = TaskId::new(
            EnvFamily::Walker2d,
            ShiftType::Morph,
            Some("leg"),
            ShiftLevel::Named(Difficulty::Medium),
        );
        assert_eq!(format_task_name(&id), "walker2d-morph-leg-medium");

        let id = TaskId::new(
            EnvFamily::PointMass,
            ShiftType::Gravity,
            None,
            ShiftLevel::Factor(2.0),
        );
        assert_eq!(format_task_name(&id), "pointmass-gravity-2.0");
    }

    #[test]
    fn round_trips_full_registry() {
        let names = all_task_names();
        assert_eq!(names.len(), 156);
        for name in names {
            let id = parse_task_name(&name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(format_task_name(&id), name);
        }
    }

    #[test]
    fn antmaze_names_use_size_token() {
        let id = parse_task_name("antmaze-small-empty").unwrap();
        assert_eq!(id.env_family, EnvFamily::AntMaze);
        assert_eq!(id.shift_type, ShiftType::Layout);
        assert_eq!(id.shift_part.as_deref(), Some("small"));
        assert_eq!(format_task_name(&id), "antmaze-small-empty");

        assert!(parse_task_name("antmaze-small-7").is_err());
        assert!(parse_task_name("antmaze-medium-empty").is_err());
        assert!(parse_task_name("antmaze-medium-3").is_ok());
    }

    #[test]
    fn identity_gravity_level_parses() {
        let id = parse_task_name("pointmass-gravity-1.0").unwrap();
        assert_eq!(id.shift_level, ShiftLevel::Factor(1.0));
    }
}
