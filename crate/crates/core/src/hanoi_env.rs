//! The 3-disk Tower of Hanoi as a finite deterministic MDP.
//!
//! A configuration is the triple of pegs holding each disk, smallest disk
//! first. Disks sharing a peg are always stacked by size, so the triple is a
//! complete encoding and all 3^3 = 27 triples are reachable configurations.
//! States print as their three-digit label, e.g. `"111"` (every disk on the
//! first peg) or `"223"`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const DISKS: usize = 3;
pub const PEGS: u8 = 3;
pub const NUM_STATES: usize = 27;
/// Directed legal moves over the whole state graph.
pub const NUM_MOVES: usize = 78;
/// No configuration has more than three legal successors.
pub const MAX_BRANCHING: usize = 3;

pub const GOAL_REWARD: f64 = 100.0;

/// One configuration of the puzzle. `pegs[i]` is the peg (1..=3) holding disk
/// `i`, with disk 0 the smallest.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HanoiState {
    pegs: [u8; DISKS],
}

impl HanoiState {
    pub const START: HanoiState = HanoiState { pegs: [1, 1, 1] };
    pub const GOAL: HanoiState = HanoiState { pegs: [2, 2, 2] };

    pub fn new(pegs: [u8; DISKS]) -> Result<Self> {
        if pegs.iter().all(|p| (1..=PEGS).contains(p)) {
            Ok(Self { pegs })
        } else {
            Err(Error::InvalidState(format!("{pegs:?}")))
        }
    }

    /// Inverse of [`HanoiState::index`].
    pub fn from_index(index: usize) -> Self {
        assert!(index < NUM_STATES, "state index {index} out of range");
        let digit = |place: usize| (index / place % 3) as u8 + 1;
        Self {
            pegs: [digit(9), digit(3), digit(1)],
        }
    }

    /// Position in the lexicographic enumeration, `"111"` = 0 ... `"333"` = 26.
    pub fn index(self) -> usize {
        self.pegs
            .iter()
            .fold(0, |acc, &p| acc * 3 + usize::from(p - 1))
    }

    pub fn pegs(self) -> [u8; DISKS] {
        self.pegs
    }

    pub fn is_goal(self) -> bool {
        self == Self::GOAL
    }

    /// Successors reachable in one legal move, in lexicographic order.
    pub fn legal_moves(self) -> &'static [HanoiState] {
        &graph().successors[self.index()]
    }

    pub fn is_legal_move(self, to: HanoiState) -> bool {
        self.legal_moves().contains(&to)
    }

    /// Position of `to` within `self.legal_moves()`.
    pub fn move_slot(self, to: HanoiState) -> Result<usize> {
        self.legal_moves()
            .iter()
            .position(|&t| t == to)
            .ok_or(Error::IllegalMove { from: self, to })
    }

    /// Moving disk `disk` is legal when no smaller disk sits on its source
    /// peg or on the destination peg.
    fn compute_successors(self) -> Vec<HanoiState> {
        let mut out = Vec::with_capacity(MAX_BRANCHING);
        for disk in 0..DISKS {
            let src = self.pegs[disk];
            let smaller = &self.pegs[..disk];
            if smaller.contains(&src) {
                continue;
            }
            for dst in (1..=PEGS).filter(|&p| p != src && !smaller.contains(&p)) {
                let mut pegs = self.pegs;
                pegs[disk] = dst;
                out.push(HanoiState { pegs });
            }
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for HanoiState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.pegs;
        write!(f, "{a}{b}{c}")
    }
}

impl fmt::Debug for HanoiState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HanoiState({self})")
    }
}

impl FromStr for HanoiState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        if bytes.len() != DISKS {
            return Err(Error::InvalidState(s.to_owned()));
        }
        let mut pegs = [0u8; DISKS];
        for (slot, &b) in pegs.iter_mut().zip(bytes) {
            match b {
                b'1'..=b'3' => *slot = b - b'0',
                _ => return Err(Error::InvalidState(s.to_owned())),
            }
        }
        Ok(Self { pegs })
    }
}

/// A directed legal move between two configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub from: HanoiState,
    pub to: HanoiState,
}

impl Move {
    pub fn new(from: HanoiState, to: HanoiState) -> Result<Self> {
        if from.is_legal_move(to) {
            Ok(Self { from, to })
        } else {
            Err(Error::IllegalMove { from, to })
        }
    }
}

struct Graph {
    states: Vec<HanoiState>,
    successors: Vec<Vec<HanoiState>>,
    moves: Vec<Move>,
}

fn graph() -> &'static Graph {
    static GRAPH: OnceLock<Graph> = OnceLock::new();
    GRAPH.get_or_init(|| {
        let states: Vec<_> = (0..NUM_STATES).map(HanoiState::from_index).collect();
        let successors: Vec<_> = states.iter().map(|s| s.compute_successors()).collect();
        let moves = states
            .iter()
            .zip(&successors)
            .flat_map(|(&from, succ)| succ.iter().map(move |&to| Move { from, to }))
            .collect();
        Graph {
            states,
            successors,
            moves,
        }
    })
}

/// All 27 configurations in lexicographic label order.
pub fn enumerate_states() -> &'static [HanoiState] {
    &graph().states
}

/// Every legal directed move, grouped by source state in enumeration order.
pub fn all_moves() -> &'static [Move] {
    &graph().moves
}

pub fn legal_moves(s: HanoiState) -> &'static [HanoiState] {
    s.legal_moves()
}

pub fn is_goal(s: HanoiState) -> bool {
    s.is_goal()
}

/// Reward for a legal move: [`GOAL_REWARD`] when entering the goal, 0 otherwise.
pub fn reward(from: HanoiState, to: HanoiState) -> Result<f64> {
    if !from.is_legal_move(to) {
        return Err(Error::IllegalMove { from, to });
    }
    Ok(if to.is_goal() { GOAL_REWARD } else { 0.0 })
}

/// Reward lookup restricted to legal moves. Illegal pairs have no entry.
#[derive(Clone, Copy, Debug, Default)]
pub struct RewardMatrix;

impl RewardMatrix {
    pub fn get(&self, from: HanoiState, to: HanoiState) -> Result<f64> {
        reward(from, to)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Move, f64)> {
        all_moves()
            .iter()
            .map(|&m| (m, if m.to.is_goal() { GOAL_REWARD } else { 0.0 }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> HanoiState {
        s.parse().unwrap()
    }

    /// Independent oracle: model the pegs as stacks and move top disks.
    fn stack_successors(s: HanoiState) -> Vec<HanoiState> {
        let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); 3];
        for disk in (0..DISKS).rev() {
            stacks[usize::from(s.pegs()[disk]) - 1].push(disk);
        }
        let mut out = Vec::new();
        for src in 0..3 {
            let Some(&top) = stacks[src].last() else {
                continue;
            };
            for (dst, stack) in stacks.iter().enumerate() {
                if dst == src || stack.last().is_some_and(|&d| d < top) {
                    continue;
                }
                let mut pegs = s.pegs();
                pegs[top] = dst as u8 + 1;
                out.push(HanoiState::new(pegs).unwrap());
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let states = enumerate_states();
        assert_eq!(states.len(), 27);
        assert_eq!(states[0].to_string(), "111");
        assert_eq!(states[26].to_string(), "333");
        assert!(states
            .windows(2)
            .all(|w| w[0].to_string() < w[1].to_string()));
        assert!(states.contains(&st("121")) && states.contains(&st("223")));
        for (i, s) in states.iter().enumerate() {
            assert_eq!(s.index(), i);
        }
    }

    #[test]
    fn successors_match_stack_oracle() {
        for &s in enumerate_states() {
            assert_eq!(s.legal_moves(), stack_successors(s).as_slice(), "{s}");
        }
        assert_eq!(legal_moves(st("111")), &[st("211"), st("311")]);
        assert_eq!(legal_moves(st("222")), &[st("122"), st("322")]);
    }

    #[test]
    fn census() {
        let degrees: Vec<_> = enumerate_states()
            .iter()
            .map(|s| s.legal_moves().len())
            .collect();
        assert!(degrees.iter().all(|d| (2..=3).contains(d)));
        let corners: Vec<_> = enumerate_states()
            .iter()
            .filter(|s| s.legal_moves().len() == 2)
            .map(|s| s.to_string())
            .collect();
        assert_eq!(corners, ["111", "222", "333"]);
        assert_eq!(degrees.iter().sum::<usize>(), NUM_MOVES);
        assert_eq!(all_moves().len(), NUM_MOVES);
    }

    #[test]
    fn moves_are_reversible_single_disk_changes() {
        for m in all_moves() {
            assert!(m.to.is_legal_move(m.from));
            let changed = (0..DISKS)
                .filter(|&i| m.from.pegs()[i] != m.to.pegs()[i])
                .count();
            assert_eq!(changed, 1);
        }
    }

    #[test]
    fn rewards() {
        assert_eq!(reward(st("122"), st("222")).unwrap(), 100.0);
        assert_eq!(reward(st("111"), st("211")).unwrap(), 0.0);
        assert!(matches!(
            reward(st("111"), st("222")),
            Err(Error::IllegalMove { .. })
        ));
        for (m, r) in RewardMatrix.entries() {
            assert_eq!(r == GOAL_REWARD, m.to.is_goal());
        }
    }

    #[test]
    fn goal() {
        assert!(is_goal(st("222")));
        assert!(!is_goal(st("111")));
        assert!(!is_goal(st("223")));
    }

    #[test]
    fn parse_rejects_bad_labels() {
        for bad in ["", "11", "1111", "011", "124", "a22"] {
            assert!(bad.parse::<HanoiState>().is_err(), "{bad}");
        }
        assert!(HanoiState::new([0, 1, 1]).is_err());
        assert!(Move::new(st("111"), st("222")).is_err());
    }
}
