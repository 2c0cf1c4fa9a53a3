use std::path::PathBuf;

use crate::hanoi_env::HanoiState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("illegal move {from} -> {to}")]
    IllegalMove { from: HanoiState, to: HanoiState },

    #[error("no move is defined from the goal state {0}")]
    GoalReached(HanoiState),

    #[error("invalid state label {0:?}: expected three digits in 1..=3")]
    InvalidState(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("plot domain error: {0}")]
    PlotDomain(String),

    #[error("malformed csv: {0}")]
    Csv(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
