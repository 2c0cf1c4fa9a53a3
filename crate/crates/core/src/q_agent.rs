//! Tabular Q-learning over the legal moves of the puzzle.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::hanoi_env::{all_moves, HanoiState, MAX_BRANCHING, NUM_STATES};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentParams {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl Default for AgentParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            gamma: 0.8,
            epsilon: 0.05,
        }
    }
}

impl AgentParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma must lie in (0, 1), got {}",
                self.gamma
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Action values for the 78 legal moves, addressed by (state, successor).
/// Slots past a state's branching factor are never read or written.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    values: [[f64; MAX_BRANCHING]; NUM_STATES],
}

impl Default for QTable {
    fn default() -> Self {
        Self::new()
    }
}

impl QTable {
    pub fn new() -> Self {
        Self {
            values: [[0.0; MAX_BRANCHING]; NUM_STATES],
        }
    }

    pub fn get(&self, from: HanoiState, to: HanoiState) -> Result<f64> {
        Ok(self.values[from.index()][from.move_slot(to)?])
    }

    pub fn set(&mut self, from: HanoiState, to: HanoiState, q: f64) -> Result<()> {
        let slot = from.move_slot(to)?;
        self.values[from.index()][slot] = q;
        Ok(())
    }

    fn row(&self, s: HanoiState) -> &[f64] {
        &self.values[s.index()][..s.legal_moves().len()]
    }

    /// Largest action value available from `s`.
    pub fn best_q(&self, s: HanoiState) -> f64 {
        self.row(s)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = (HanoiState, HanoiState, f64)> + '_ {
        all_moves().iter().map(move |m| {
            let slot = m.from.move_slot(m.to).expect("legal");
            (m.from, m.to, self.values[m.from.index()][slot])
        })
    }

    pub fn is_zero(&self) -> bool {
        self.iter().all(|(_, _, q)| q == 0.0)
    }

    /// Successors of `s` whose value ties for the maximum.
    pub fn greedy_moves(&self, s: HanoiState) -> impl Iterator<Item = HanoiState> + '_ {
        let best = self.best_q(s);
        s.legal_moves()
            .iter()
            .zip(self.row(s))
            .filter(move |(_, &q)| q == best)
            .map(|(&t, _)| t)
    }

    /// Follows the first greedy move from `start` until the goal, giving up
    /// after `limit` moves. `None` when the greedy path cycles past the limit.
    pub fn greedy_path_len(&self, start: HanoiState, limit: usize) -> Option<usize> {
        let mut s = start;
        for n in 0..=limit {
            if s.is_goal() {
                return Some(n);
            }
            s = self
                .greedy_moves(s)
                .next()
                .expect("non-goal states have moves");
        }
        None
    }

    /// `from,to,q` rows for every legal move.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("from,to,q\n");
        for (from, to, q) in self.iter() {
            let _ = writeln!(out, "{from},{to},{q:.6}");
        }
        out
    }
}

pub fn best_q(q: &QTable, s: HanoiState) -> f64 {
    q.best_q(s)
}

/// Epsilon-greedy choice among the legal successors of `s`. Greedy ties are
/// broken uniformly at random.
pub fn select_action<R: Rng + ?Sized>(
    q: &QTable,
    s: HanoiState,
    epsilon: f64,
    rng: &mut R,
) -> HanoiState {
    let moves = s.legal_moves();
    debug_assert!(!moves.is_empty(), "no action from the goal state");
    if rng.random_bool(epsilon) {
        return moves[rng.random_range(0..moves.len())];
    }
    let row = q.row(s);
    let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut tied = [0usize; MAX_BRANCHING];
    let mut n = 0;
    for (i, &v) in row.iter().enumerate() {
        if v == best {
            tied[n] = i;
            n += 1;
        }
    }
    let pick = if n == 1 { 0 } else { rng.random_range(0..n) };
    moves[tied[pick]]
}

/// Watkins update `q(s,t) <- (1-a) q(s,t) + a (r + g max_u q(t,u))`, with no
/// continuation value once `t` is the goal.
pub fn update(
    q: &mut QTable,
    s: HanoiState,
    t: HanoiState,
    r: f64,
    params: &AgentParams,
) -> Result<()> {
    let slot = s.move_slot(t)?;
    let continuation = if t.is_goal() { 0.0 } else { q.best_q(t) };
    let cell = &mut q.values[s.index()][slot];
    *cell = (1.0 - params.alpha) * *cell + params.alpha * (r + params.gamma * continuation);
    Ok(())
}
