//! Command-line surface. Parsing only; `main` owns the file system.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::experiment::{
    ExperimentConfig, DEFAULT_EPISODE_GRID, DEFAULT_MOVE_CAP, DEFAULT_REPETITIONS,
};
use crate::interventions::InterventionPolicy;
use crate::reporting::{Scenario, ScenarioKind};

#[derive(Debug, Parser)]
#[command(
    name = "hanoi-help",
    version,
    about = "Q-learning on the 3-disk Tower of Hanoi with and without expert help"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// No help vs. the expert playing every other move, plus random baselines
    Fig1(Common),
    /// Expert every 2, 3 and 4 moves vs. no help
    Fig2(Common),
    /// Ask-for-help threshold sweep vs. no help (learns from expert moves)
    Fig3(Common),
    /// One curve with a chosen intervention protocol
    Custom(CustomArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Training-episode budgets, comma separated and strictly increasing
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EPISODE_GRID)]
    episodes: Vec<u64>,
    /// Repetitions per budget
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-episode truncation
    #[arg(long, default_value_t = DEFAULT_MOVE_CAP)]
    move_cap: usize,
    /// Let the agent update on moves made by the expert
    #[arg(long)]
    learn_from_expert: bool,
    /// Evaluate with exploration switched off
    #[arg(long)]
    eval_greedy: bool,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (defaults to one per core); results do not depend on it
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct CustomArgs {
    /// Expert plays every PERIOD-th move
    #[arg(long, conflicts_with = "threshold")]
    period: Option<u32>,
    /// Expert plays whenever the agent's best action value is below THRESHOLD
    #[arg(long)]
    threshold: Option<f64>,
    #[command(flatten)]
    common: Common,
}

/// A fully resolved command line.
#[derive(Clone, Debug, PartialEq)]
pub struct Invocation {
    pub scenario: Scenario,
    pub out: PathBuf,
    pub workers: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Config(#[from] crate::Error),
}

impl Common {
    fn config(&self, policy: InterventionPolicy) -> ExperimentConfig {
        ExperimentConfig {
            policy,
            episode_grid: self.episodes.clone(),
            repetitions: self.reps,
            master_seed: self.seed,
            move_cap: self.move_cap,
            learn_from_expert: self.learn_from_expert,
            eval_epsilon_active: !self.eval_greedy,
            ..ExperimentConfig::default()
        }
    }
}

/// Parses `args` (program name first) into a validated invocation.
pub fn parse_cli<I, T>(args: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let (kind, common, policy) = match cli.command {
        Command::Fig1(c) => (
            ScenarioKind::Fig1,
            c,
            InterventionPolicy::Canonical { period: 2 },
        ),
        Command::Fig2(c) => (
            ScenarioKind::Fig2,
            c,
            InterventionPolicy::Canonical { period: 2 },
        ),
        Command::Fig3(c) => (ScenarioKind::Fig3, c, InterventionPolicy::NoHelp),
        Command::Custom(a) => {
            let policy = match (a.period, a.threshold) {
                (Some(period), None) => InterventionPolicy::Canonical { period },
                (None, Some(threshold)) => InterventionPolicy::AskForHelp { threshold },
                (None, None) => InterventionPolicy::NoHelp,
                (Some(_), Some(_)) => unreachable!("clap rejects --period with --threshold"),
            };
            (ScenarioKind::Custom, a.common, policy)
        }
    };
    if common.workers == Some(0) {
        return Err(crate::Error::InvalidConfig("--workers must be at least 1".into()).into());
    }
    let base = common.config(policy);
    base.validate()?;
    Ok(Invocation {
        scenario: Scenario { kind, base },
        out: common.out,
        workers: common.workers,
    })
}
