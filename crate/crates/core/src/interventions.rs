//! When does the expert take the turn?

use std::fmt;

use crate::error::{Error, Result};

/// Who gets help, and how.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InterventionPolicy {
    NoHelp,
    /// Turn-taking: the agent moves first and the expert plays every
    /// `period`-th move.
    Canonical {
        period: u32,
    },
    /// The expert plays whenever the agent's best action value at the current
    /// state is strictly below `threshold`.
    AskForHelp {
        threshold: f64,
    },
}

pub const DEFAULT_PERIOD: u32 = 2;
pub const PERIOD_SWEEP: [u32; 3] = [2, 3, 4];
/// Brackets the optimal value ladder `100 * 0.8^d`, d = 0..=6.
pub const THRESHOLD_SWEEP: [f64; 4] = [10.0, 26.0, 50.0, 80.0];

impl InterventionPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::NoHelp => Ok(()),
            Self::Canonical { period } if period < 2 => Err(Error::InvalidConfig(format!(
                "canonical period must be at least 2, got {period}"
            ))),
            Self::Canonical { .. } => Ok(()),
            Self::AskForHelp { threshold } if !(0.0..=100.0).contains(&threshold) => {
                Err(Error::InvalidConfig(format!(
                    "ask-for-help threshold must lie in [0, 100], got {threshold}"
                )))
            }
            Self::AskForHelp { .. } => Ok(()),
        }
    }

    pub fn should_intervene(&self, ctx: TurnContext) -> bool {
        should_intervene(self, ctx)
    }
}

impl fmt::Display for InterventionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoHelp => f.write_str("no-help"),
            Self::Canonical { period } => write!(f, "canonical-{period}"),
            Self::AskForHelp { threshold } => write!(f, "ask-for-help-{threshold}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TurnContext {
    /// Moves already made this episode by either player.
    pub turn_index: usize,
    /// The agent's best action value at the current state.
    pub best_q_value: f64,
}

pub fn should_intervene(policy: &InterventionPolicy, ctx: TurnContext) -> bool {
    match *policy {
        InterventionPolicy::NoHelp => false,
        InterventionPolicy::Canonical { period } => {
            let k = period as usize;
            ctx.turn_index % k == k - 1
        }
        InterventionPolicy::AskForHelp { threshold } => ctx.best_q_value < threshold,
    }
}
