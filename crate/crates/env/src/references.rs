//! Reference returns registry: per task, the mean return of a uniform-random
//! policy and of a trained expert in the target domain. These anchor the
//! normalized score.

use crate::error::EnvError;
use offdyn_core::task::{format_task_name, TaskId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One registry row. `episodes` records how many evaluation episodes backed
/// each value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    pub j_random: f64,
    pub j_expert: f64,
    pub episodes: u32,
}

#[derive(Debug, Clone, Default)]
pub struct ReferenceRegistry {
    entries: BTreeMap<String, ReferenceEntry>,
}

/// Registry shipped with the crate, produced by the `make-references`
/// pipeline (uniform-random policy and trained per-task experts, 100
/// episodes each).
pub const BUILTIN_REFERENCES: &str = include_str!("../assets/references.toml");

impl ReferenceRegistry {
    pub fn from_toml(text: &str) -> Result<Self, EnvError> {
        let raw: BTreeMap<String, ReferenceEntry> =
            toml::from_str(text).map_err(|e| EnvError::RegistryParse(e.to_string()))?;
        let mut reg = ReferenceRegistry::default();
        for (task, entry) in raw {
            reg.insert(&task, entry)?;
        }
        Ok(reg)
    }

    pub fn builtin() -> Self {
        Self::from_toml(BUILTIN_REFERENCES).expect("bundled registry is valid")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, EnvError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EnvError::RegistryParse(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Inserts an entry, rejecting degenerate references (expert must beat
    /// random, otherwise the normalized score is undefined).
    pub fn insert(&mut self, task: &str, entry: ReferenceEntry) -> Result<(), EnvError> {
        if entry.j_expert <= entry.j_random {
            return Err(EnvError::DegenerateReference {
                task: task.to_owned(),
                expert: entry.j_expert,
                random: entry.j_random,
            });
        }
        self.entries.insert(task.to_owned(), entry);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ReferenceEntry)> {
        self.entries.iter()
    }

    pub fn get(&self, task: &str) -> Option<ReferenceEntry> {
        self.entries.get(task).copied()
    }

    pub fn to_toml(&self) -> String {
        let mut out = String::from(
            "# Reference returns per task: mean return of the uniform-random policy\n# and of the trained expert in the target domain.\n",
        );
        for (task, e) in &self.entries {
            out.push_str(&format!(
                "\n[\"{task}\"]\nj_random = {:?}\nj_expert = {:?}\nepisodes = {}\n",
                e.j_random, e.j_expert, e.episodes
            ));
        }
        out
    }
}

/// Looks up `(J_r, J_e)` for a task in the bundled registry.
pub fn reference_returns(registry: &ReferenceRegistry, id: &TaskId) -> Result<(f64, f64), EnvError> {
    let name = format_task_name(id);
    registry
        .get(&name)
        .map(|e| (e.j_random, e.j_expert))
        .ok_or(EnvError::MissingReference(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use offdyn_core::task::parse_task_name;

    #[test]
    fn degenerate_entries_are_rejected() {
        let mut reg = ReferenceRegistry::default();
        let err = reg
            .insert("pointmass-gravity-2.0", ReferenceEntry { j_random: 1.0, j_expert: 1.0, episodes: 100 })
            .unwrap_err();
        assert!(matches!(err, EnvError::DegenerateReference { .. }));
        assert!(reg.is_empty());
    }

    #[test]
    fn toml_round_trip() {
        let mut reg = ReferenceRegistry::default();
        reg.insert(
            "pointmass-gravity-2.0",
            ReferenceEntry { j_random: -1400.25, j_expert: -118.5, episodes: 100 },
        )
        .unwrap();
        reg.insert(
            "pointmaze-layout-empty",
            ReferenceEntry { j_random: 0.01, j_expert: 1.0, episodes: 100 },
        )
        .unwrap();
        let text = reg.to_toml();
        let loaded = ReferenceRegistry::from_toml(&text).unwrap();
        assert_eq!(loaded.get("pointmass-gravity-2.0"), reg.get("pointmass-gravity-2.0"));
        assert_eq!(loaded.len(), 2);
    }

    #[test]
    fn missing_reference_error_names_the_task() {
        let reg = ReferenceRegistry::default();
        let id = parse_task_name("pointmass-gravity-2.0").unwrap();
        assert_eq!(
            reference_returns(&reg, &id),
            Err(EnvError::MissingReference("pointmass-gravity-2.0".into()))
        );
    }

    #[test]
    fn degenerate_toml_fails_to_load() {
        let text = "[\"pointmass-gravity-2.0\"]\nj_random = 5.0\nj_expert = 5.0\nepisodes = 100\n";
        assert!(ReferenceRegistry::from_toml(text).is_err());
    }
}
