use thiserror::Error;

use crate::rule::MAX_STATES;

/// Errors produced by the library.
///
/// Domain and parse errors are caller mistakes; [`Error::Budget`] means a
/// configured resource cap was hit and says nothing about the rule itself.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported number of states {0}; expected 2..={MAX_STATES}")]
    StateCount(usize),

    #[error("RMT {rmt} out of range for d = {d} (must be < {})", d * d * d)]
    RmtOutOfRange { rmt: usize, d: usize },

    #[error("set index {index} out of range for d = {d} (must be < {})", d * d)]
    SetIndexOutOfRange { index: usize, d: usize },

    #[error("state {state} out of range for d = {d}")]
    StateOutOfRange { state: usize, d: usize },

    #[error("cell count {0} too small; at least 3 cells are required")]
    CellCount(usize),

    #[error("invalid range {lo}..={hi}")]
    EmptyRange { lo: usize, hi: usize },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("{what} budget exceeded: need {needed}, budget is {budget}")]
    Budget {
        what: &'static str,
        needed: u128,
        budget: u128,
    },
}

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }

    /// True for resource-cap failures, which are diagnostics rather than
    /// statements about the automaton.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
