//! Reversibility of one-dimensional, three-neighbourhood cellular automata
//! on a ring of `n` cells, decided through a minimised reachability tree.
//!
//! ```
//! use carev::{decide, Rule, States};
//!
//! let rule = Rule::parse("000111222000111222000111222", States::new(3).unwrap()).unwrap();
//! assert!(decide(&rule, 100).unwrap().is_reversible());
//! ```

pub mod decider;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod infinite;
pub mod oracle;
pub mod reachability;
pub mod report;
pub mod rmt_set;
pub mod rule;
pub mod strategies;

pub use decider::{
    decide, decide_batch, decide_range, decide_range_with, decide_with, frontier_closure,
    DecideOptions, Outcome, Verdict, Witness, DEFAULT_NODE_BUDGET,
};
pub use error::{Error, Result};
pub use evolution::{
    build_debruijn, export_dot, orbit, step, step_aligned, Alignment, Configuration, DeBruijnGraph,
};
pub use exec::Execution;
pub use infinite::{conjecture_experiment, infinite_injective, InjectivityReport};
pub use oracle::{
    find_nonreachable, oracle_is_reversible, oracle_with, GlobalMapSummary, OracleOptions,
    DEFAULT_ORACLE_BUDGET,
};
pub use reachability::{EdgeLabel, LevelClass, TreeNode};
pub use rmt_set::RmtSet;
pub use rule::{Neighborhood, Rule, States};
pub use strategies::{count_balanced, enumerate_strategy, sample_strategy, Family, Strategy};
