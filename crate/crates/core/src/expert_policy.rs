//! The expert player and the exact solutions it is built from.
//!
//! [`compute_distances`] runs a breadth-first search outward from the goal;
//! the expert always takes a move that lowers that distance by one.
//! [`value_iteration`] solves the Bellman optimality equations of the reward
//! matrix directly and serves as the reference for what Q-learning should
//! converge to.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::hanoi_env::{
    all_moves, enumerate_states, reward, HanoiState, Move, MAX_BRANCHING, NUM_STATES,
};

/// Minimum number of moves from each state to the goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMap {
    dist: [u32; NUM_STATES],
}

impl DistanceMap {
    pub fn get(&self, s: HanoiState) -> u32 {
        self.dist[s.index()]
    }

    pub fn max(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }

    /// `state,distance` rows in enumeration order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("state,distance\n");
        for &s in enumerate_states() {
            let _ = writeln!(out, "{s},{}", self.get(s));
        }
        out
    }
}

pub fn compute_distances() -> DistanceMap {
    let mut dist = [u32::MAX; NUM_STATES];
    let mut queue = VecDeque::from([HanoiState::GOAL]);
    dist[HanoiState::GOAL.index()] = 0;
    while let Some(s) = queue.pop_front() {
        let d = dist[s.index()];
        // moves are reversible, so successors are also predecessors
        for &t in s.legal_moves() {
            if dist[t.index()] == u32::MAX {
                dist[t.index()] = d + 1;
                queue.push_back(t);
            }
        }
    }
    debug_assert!(dist.iter().all(|&d| d != u32::MAX));
    DistanceMap { dist }
}

/// Always plays a shortest-path move toward the goal.
#[derive(Clone, Debug)]
pub struct Expert {
    distances: DistanceMap,
    choice: [Option<HanoiState>; NUM_STATES],
}

impl Expert {
    pub fn new() -> Self {
        let distances = compute_distances();
        let mut choice = [None; NUM_STATES];
        for &s in enumerate_states().iter().filter(|s| !s.is_goal()) {
            let target = distances.get(s) - 1;
            // legal_moves is sorted, so the first hit is the smallest label
            choice[s.index()] = s
                .legal_moves()
                .iter()
                .copied()
                .find(|&t| distances.get(t) == target);
        }
        Self { distances, choice }
    }

    /// Process-wide instance; the expert is immutable once built.
    pub fn shared() -> &'static Expert {
        static EXPERT: OnceLock<Expert> = OnceLock::new();
        EXPERT.get_or_init(Expert::new)
    }

    pub fn distances(&self) -> &DistanceMap {
        &self.distances
    }

    pub fn action(&self, s: HanoiState) -> Result<HanoiState> {
        self.choice[s.index()].ok_or(Error::GoalReached(s))
    }
}

impl Default for Expert {
    fn default() -> Self {
        Self::new()
    }
}

pub fn expert_action(s: HanoiState) -> Result<HanoiState> {
    Expert::shared().action(s)
}

/// Optimal action values for every legal move.
#[derive(Clone, Debug)]
pub struct OptimalQTable {
    values: [[f64; MAX_BRANCHING]; NUM_STATES],
    pub iterations: usize,
}

impl OptimalQTable {
    pub fn get(&self, m: Move) -> f64 {
        let slot = m
            .from
            .move_slot(m.to)
            .expect("Move is only constructible for legal pairs");
        self.values[m.from.index()][slot]
    }

    pub fn q(&self, from: HanoiState, to: HanoiState) -> Result<f64> {
        Ok(self.values[from.index()][from.move_slot(to)?])
    }

    /// State value, zero at the absorbing goal.
    pub fn value(&self, s: HanoiState) -> f64 {
        if s.is_goal() {
            return 0.0;
        }
        let n = s.legal_moves().len();
        self.values[s.index()][..n]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Synchronous Bellman optimality backups from all-zero values until the
/// largest change falls below `tolerance`. The goal is absorbing with zero
/// continuation value.
pub fn value_iteration(gamma: f64, tolerance: f64) -> OptimalQTable {
    assert!(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    assert!(tolerance > 0.0, "tolerance must be positive");

    let mut table = OptimalQTable {
        values: [[0.0; MAX_BRANCHING]; NUM_STATES],
        iterations: 0,
    };
    loop {
        let mut next = table.values;
        let mut delta: f64 = 0.0;
        for m in all_moves() {
            let slot = m.from.move_slot(m.to).expect("legal");
            let r = reward(m.from, m.to).expect("legal");
            let q = r + gamma * table.value(m.to);
            delta = delta.max((q - table.values[m.from.index()][slot]).abs());
            next[m.from.index()][slot] = q;
        }
        table.values = next;
        table.iterations += 1;
        if delta < tolerance {
            return table;
        }
    }
}
