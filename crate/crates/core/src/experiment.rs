//! Episodes, training, frozen evaluation and the repeated-run harness that
//! produces learning curves.
//!
//! Every (budget, repetition) cell owns its table and a ChaCha stream seeded
//! purely from `(master_seed, budget, repetition)`, so results do not depend
//! on scheduling or on the number of worker threads. Cells are reduced in
//! grid order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expert_policy::Expert;
use crate::hanoi_env::{reward, HanoiState, NUM_STATES};
use crate::interventions::{InterventionPolicy, TurnContext};
use crate::q_agent::{select_action, update, AgentParams, QTable};

pub const DEFAULT_EPISODE_GRID: [u64; 9] = [1, 3, 10, 30, 100, 300, 1000, 3000, 10000];
pub const DEFAULT_REPETITIONS: usize = 100;
pub const DEFAULT_MOVE_CAP: usize = 10_000;
/// Optimal solution length from the start state.
pub const OPTIMAL_MOVES: usize = 7;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub agent: AgentParams,
    pub policy: InterventionPolicy,
    /// Training-episode budgets, strictly increasing.
    pub episode_grid: Vec<u64>,
    pub repetitions: usize,
    pub master_seed: u64,
    /// Episodes are truncated after this many moves.
    pub move_cap: usize,
    /// Whether the agent also updates on moves the expert made.
    pub learn_from_expert: bool,
    /// Keep epsilon-exploration on during evaluation episodes.
    pub eval_epsilon_active: bool,
    pub eval_episodes_per_rep: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            agent: AgentParams::default(),
            policy: InterventionPolicy::NoHelp,
            episode_grid: DEFAULT_EPISODE_GRID.to_vec(),
            repetitions: DEFAULT_REPETITIONS,
            master_seed: 0,
            move_cap: DEFAULT_MOVE_CAP,
            learn_from_expert: false,
            eval_epsilon_active: true,
            eval_episodes_per_rep: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn with_policy(policy: InterventionPolicy) -> Self {
        Self {
            policy,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.agent.validate()?;
        self.policy.validate()?;
        if !self.episode_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig(
                "episode grid must be strictly increasing".into(),
            ));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig(
                "repetitions must be at least 1".into(),
            ));
        }
        if self.move_cap < OPTIMAL_MOVES {
            return Err(Error::InvalidConfig(format!(
                "move cap must be at least {OPTIMAL_MOVES}, got {}",
                self.move_cap
            )));
        }
        if self.eval_episodes_per_rep == 0 {
            return Err(Error::InvalidConfig(
                "at least one evaluation episode per repetition is required".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Actor {
    Agent,
    Expert,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub state: HanoiState,
    pub actor: Actor,
    pub successor: HanoiState,
    pub reward: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EpisodeLog {
    pub moves: Vec<Step>,
    pub total_moves: usize,
    pub expert_moves: usize,
    pub truncated: bool,
}

impl EpisodeLog {
    /// Every state occupied during the episode, start state included.
    pub fn visited(&self) -> impl Iterator<Item = HanoiState> + '_ {
        std::iter::once(HanoiState::START).chain(self.moves.iter().map(|m| m.successor))
    }
}

/// Per-state visit counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VisitCensus {
    counts: [u64; NUM_STATES],
}

impl Default for VisitCensus {
    fn default() -> Self {
        Self {
            counts: [0; NUM_STATES],
        }
    }
}

impl VisitCensus {
    pub fn record(&mut self, s: HanoiState) {
        self.counts[s.index()] += 1;
    }

    pub fn record_episode(&mut self, log: &EpisodeLog) {
        log.visited().for_each(|s| self.record(s));
    }

    pub fn merge(&mut self, other: &VisitCensus) {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
    }

    pub fn get(&self, s: HanoiState) -> u64 {
        self.counts[s.index()]
    }

    pub fn unvisited(&self) -> impl Iterator<Item = HanoiState> + '_ {
        (0..NUM_STATES)
            .filter(|&i| self.counts[i] == 0)
            .map(HanoiState::from_index)
    }
}

/// One point of a learning curve, aggregated over repetitions.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub episodes_trained: u64,
    pub mean_moves: f64,
    pub stddev_moves: f64,
    pub mean_expert_moves: f64,
    /// Visits accumulated over every training episode at this budget.
    pub states_visited_census: VisitCensus,
    /// Truncated episodes, training and evaluation combined.
    pub truncated_episodes: u64,
}

/// Plays one episode from the start state. Returns the full move log; a
/// truncated episode is a normal outcome.
pub fn run_episode<R: rand::Rng + ?Sized>(
    q: &mut QTable,
    cfg: &ExperimentConfig,
    learning: bool,
    rng: &mut R,
) -> EpisodeLog {
    let expert = Expert::shared();
    let epsilon = if learning || cfg.eval_epsilon_active {
        cfg.agent.epsilon
    } else {
        0.0
    };
    let mut log = EpisodeLog::default();
    let mut s = HanoiState::START;
    while !s.is_goal() {
        if log.total_moves >= cfg.move_cap {
            log.truncated = true;
            break;
        }
        let ctx = TurnContext {
            turn_index: log.total_moves,
            best_q_value: q.best_q(s),
        };
        let (actor, t) = if cfg.policy.should_intervene(ctx) {
            (
                Actor::Expert,
                expert.action(s).expect("state is not the goal"),
            )
        } else {
            (Actor::Agent, select_action(q, s, epsilon, rng))
        };
        let r = reward(s, t).expect("both players only make legal moves");
        if learning && (actor == Actor::Agent || cfg.learn_from_expert) {
            update(q, s, t, r, &cfg.agent).expect("legal move");
        }
        log.moves.push(Step {
            state: s,
            actor,
            successor: t,
            reward: r,
        });
        log.total_moves += 1;
        if actor == Actor::Expert {
            log.expert_moves += 1;
        }
        s = t;
    }
    log
}

/// Result of a training run.
#[derive(Clone, Debug)]
pub struct Training {
    pub table: QTable,
    pub census: VisitCensus,
    /// Length of every training episode, in order.
    pub episode_moves: Vec<usize>,
    pub truncated_episodes: u64,
}

/// Fresh zero table trained for `n_episodes` learning episodes.
pub fn train<R: rand::Rng + ?Sized>(
    cfg: &ExperimentConfig,
    n_episodes: u64,
    rng: &mut R,
) -> Training {
    let mut table = QTable::new();
    let mut census = VisitCensus::default();
    let mut episode_moves = Vec::with_capacity(n_episodes as usize);
    let mut truncated_episodes = 0;
    for _ in 0..n_episodes {
        let log = run_episode(&mut table, cfg, true, rng);
        census.record_episode(&log);
        episode_moves.push(log.total_moves);
        truncated_episodes += u64::from(log.truncated);
    }
    Training {
        table,
        census,
        episode_moves,
        truncated_episodes,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub moves: f64,
    pub expert_moves: f64,
    pub truncated_episodes: u64,
}

/// Mean over `cfg.eval_episodes_per_rep` non-learning episodes, played under
/// the same intervention policy as training.
pub fn evaluate<R: rand::Rng + ?Sized>(
    q: &QTable,
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Evaluation {
    let n = cfg.eval_episodes_per_rep.max(1);
    // learning is off, so the table is never written
    let mut frozen = q.clone();
    let (mut moves, mut expert, mut truncated) = (0usize, 0usize, 0u64);
    for _ in 0..n {
        let log = run_episode(&mut frozen, cfg, false, rng);
        moves += log.total_moves;
        expert += log.expert_moves;
        truncated += u64::from(log.truncated);
    }
    Evaluation {
        moves: moves as f64 / n as f64,
        expert_moves: expert as f64 / n as f64,
        truncated_episodes: truncated,
    }
}

const TRAINING_STREAM: u64 = 0x7472_6169_6e00_0001;
const BASELINE_STREAM: u64 = 0x6261_7365_6c00_0002;

/// Random stream for one cell, a pure function of its coordinates.
pub fn child_rng(master_seed: u64, budget: u64, repetition: u64) -> ChaCha8Rng {
    keyed_rng(TRAINING_STREAM, master_seed, budget, repetition)
}

fn keyed_rng(domain: u64, master_seed: u64, budget: u64, repetition: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    for (chunk, word) in seed
        .chunks_exact_mut(8)
        .zip([domain, master_seed, budget, repetition])
    {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

struct CellOutcome {
    eval: Evaluation,
    census: VisitCensus,
    truncated_training: u64,
}

fn run_cell(cfg: &ExperimentConfig, budget: u64, repetition: usize) -> CellOutcome {
    let mut rng = child_rng(cfg.master_seed, budget, repetition as u64);
    let training = train(cfg, budget, &mut rng);
    let eval = evaluate(&training.table, cfg, &mut rng);
    CellOutcome {
        eval,
        census: training.census,
        truncated_training: training.truncated_episodes,
    }
}

/// Arithmetic mean and sample standard deviation.
pub fn mean_and_stddev(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn aggregate(budget: u64, cells: &[CellOutcome]) -> CurvePoint {
    let moves: Vec<f64> = cells.iter().map(|c| c.eval.moves).collect();
    let (mean_moves, stddev_moves) = mean_and_stddev(&moves);
    let mean_expert_moves =
        cells.iter().map(|c| c.eval.expert_moves).sum::<f64>() / cells.len() as f64;
    let mut census = VisitCensus::default();
    let mut truncated = 0;
    for c in cells {
        census.merge(&c.census);
        truncated += c.truncated_training + c.eval.truncated_episodes;
    }
    CurvePoint {
        episodes_trained: budget,
        mean_moves,
        stddev_moves,
        mean_expert_moves,
        states_visited_census: census,
        truncated_episodes: truncated,
    }
}

/// Learning curve over `cfg.episode_grid`, parallel over cells on the
/// current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    cfg.validate()?;
    let reps = cfg.repetitions;
    let cells: Vec<CellOutcome> = cfg
        .episode_grid
        .par_iter()
        .flat_map(|&budget| (0..reps).into_par_iter().map(move |r| (budget, r)))
        .map(|(budget, r)| run_cell(cfg, budget, r))
        .collect();
    Ok(cfg
        .episode_grid
        .iter()
        .zip(cells.chunks(reps))
        .map(|(&budget, chunk)| aggregate(budget, chunk))
        .collect())
}

/// [`run_experiment`] on a dedicated pool of `workers` threads.
pub fn run_experiment_with_workers(
    cfg: &ExperimentConfig,
    workers: usize,
) -> Result<Vec<CurvePoint>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| run_experiment(cfg))
}

/// Untrained agent acting uniformly at random, with or without the
/// alternating expert. Reported at `episodes_trained = 0`.
pub fn random_baseline(with_help: bool, repetitions: usize, seed: u64) -> CurvePoint {
    let cfg = ExperimentConfig {
        agent: AgentParams {
            epsilon: 1.0,
            ..AgentParams::default()
        },
        policy: if with_help {
            InterventionPolicy::Canonical { period: 2 }
        } else {
            InterventionPolicy::NoHelp
        },
        repetitions: repetitions.max(1),
        ..ExperimentConfig::default()
    };
    let cells: Vec<CellOutcome> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|r| {
            let mut rng = keyed_rng(BASELINE_STREAM, seed, u64::from(with_help), r as u64);
            CellOutcome {
                eval: evaluate(&QTable::new(), &cfg, &mut rng),
                census: VisitCensus::default(),
                truncated_training: 0,
            }
        })
        .collect();
    aggregate(0, &cells)
}
