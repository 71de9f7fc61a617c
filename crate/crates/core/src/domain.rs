use serde::{Deserialize, Serialize};

/// Which MDP a sample came from. The source domain is data-rich, the target
/// domain is the one whose performance we actually care about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Source,
    Target,
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Domain::Source => write!(f, "source"),
            Domain::Target => write!(f, "target"),
        }
    }
}

/// One environment step. The atom of every replay buffer and offline dataset.
///
/// `done` marks true terminal states only. Episodes cut off by the time limit
/// keep `done = false` so that bootstrapping continues through truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub done: bool,
    pub domain: Domain,
}

impl Transition {
    /// Checks the dimensional invariants: matching state dims and actions in
    /// `[-1, 1]`.
    pub fn is_well_formed(&self) -> bool {
        self.state.len() == self.next_state.len()
            && self.action.iter().all(|a| (-1.0..=1.0).contains(a))
            && self.state.iter().all(|x| x.is_finite())
            && self.next_state.iter().all(|x| x.is_finite())
            && self.reward.is_finite()
    }
}
