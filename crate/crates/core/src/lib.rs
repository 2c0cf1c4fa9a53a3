//! Tabular Q-learning on the 3-disk Tower of Hanoi, alone or helped by an
//! expert that either takes fixed turns or plays when the learner asks.
//!
//! Modules, bottom-up:
//!
//! - [`hanoi_env`]: the 27-state puzzle graph, goal and rewards.
//! - [`expert_policy`]: shortest-path expert plus value-iteration reference.
//! - [`q_agent`]: the Q-table, epsilon-greedy selection and updates.
//! - [`interventions`]: no-help, turn-taking and ask-for-help triggers.
//! - [`experiment`]: episodes, training, evaluation and seeded repetitions.
//! - [`reporting`]: scenarios, CSV and SVG rendering, run manifests.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod expert_policy;
pub mod hanoi_env;
pub mod interventions;
pub mod q_agent;
pub mod reporting;

pub use error::{Error, Result};
pub use experiment::{CurvePoint, ExperimentConfig};
pub use hanoi_env::HanoiState;
pub use interventions::InterventionPolicy;
pub use q_agent::{AgentParams, QTable};
