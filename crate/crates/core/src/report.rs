//! Serializable records for batch tooling. Every record carries
//! `schema_version`; see the README for the field reference.

use serde::{Deserialize, Serialize};

use crate::decider::{Outcome, Verdict, Witness};
use crate::infinite::{InjectivityReport, PairVertex};
use crate::oracle::GlobalMapSummary;
use crate::rule::{Rule, States};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WitnessRecord {
    Unbalanced {
        histogram: Vec<usize>,
    },
    Cardinality {
        level: usize,
        /// The parent node, one bracketed set per set index.
        node: String,
        edge_state: u8,
        found: usize,
        expected: usize,
    },
    Complete,
}

impl From<&Witness> for WitnessRecord {
    fn from(w: &Witness) -> Self {
        match w {
            Witness::Unbalanced { histogram } => WitnessRecord::Unbalanced {
                histogram: histogram.clone(),
            },
            Witness::Cardinality {
                level,
                node,
                edge_state,
                found,
                expected,
            } => WitnessRecord::Cardinality {
                level: *level,
                node: node.to_string(),
                edge_state: *edge_state,
                found: *found,
                expected: *expected,
            },
            Witness::Complete => WitnessRecord::Complete,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub n: usize,
    pub outcome: Outcome,
    pub witness: WitnessRecord,
    pub preperiod: Option<usize>,
    pub period: Option<usize>,
    pub frontier_sizes: Vec<usize>,
}

impl From<&Verdict> for VerdictRecord {
    fn from(v: &Verdict) -> Self {
        VerdictRecord {
            n: v.n,
            outcome: v.outcome,
            witness: (&v.witness).into(),
            preperiod: v.closure.preperiod,
            period: v.closure.period,
            frontier_sizes: v.closure.frontier_sizes.clone(),
        }
    }
}

/// Output of `check`: one verdict per ring length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub schema_version: u32,
    pub rule: String,
    pub d: usize,
    /// Reversible for every `n` checked.
    pub reversible: bool,
    pub verdicts: Vec<VerdictRecord>,
}

impl CheckRecord {
    pub fn new(rule: &Rule, verdicts: &[Verdict]) -> Self {
        CheckRecord {
            schema_version: SCHEMA_VERSION,
            rule: rule.to_digits(),
            d: rule.d(),
            reversible: verdicts.iter().all(Verdict::is_reversible),
            verdicts: verdicts.iter().map(VerdictRecord::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolveRecord {
    pub schema_version: u32,
    pub rule: String,
    pub d: usize,
    pub centered: bool,
    /// Configuration at `t = 0, 1, …`.
    pub trace: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenRecord {
    pub schema_version: u32,
    pub strategy: String,
    pub d: usize,
    /// Decimal; may exceed 64 bits.
    pub family_size: String,
    /// The request exceeded the family and was clipped to all of it.
    pub clipped: bool,
    pub rules: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub schema_version: u32,
    pub rule: String,
    #[serde(flatten)]
    pub summary: GlobalMapSummary,
}

impl OracleRecord {
    pub fn new(rule: &Rule, summary: GlobalMapSummary) -> Self {
        OracleRecord {
            schema_version: SCHEMA_VERSION,
            rule: rule.to_digits(),
            summary,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessWalk {
    /// Off-diagonal pair, as `(ab,cd)`.
    pub off_diagonal: String,
    pub entry_cycle: Vec<String>,
    pub path: Vec<String>,
    pub exit_cycle: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfiniteRecord {
    pub schema_version: u32,
    pub rule: String,
    pub d: usize,
    pub injective: bool,
    pub witness: Option<WitnessWalk>,
}

impl InfiniteRecord {
    pub fn new(rule: &Rule, report: &InjectivityReport) -> Self {
        let states: States = rule.states();
        let labels = |vs: &[PairVertex]| vs.iter().map(|p| p.label(states)).collect();
        InfiniteRecord {
            schema_version: SCHEMA_VERSION,
            rule: rule.to_digits(),
            d: rule.d(),
            injective: report.injective,
            witness: report.witness.as_ref().map(|w| WitnessWalk {
                off_diagonal: w.off_diagonal.label(states),
                entry_cycle: labels(&w.entry_cycle),
                path: labels(&w.path),
                exit_cycle: labels(&w.exit_cycle),
            }),
        }
    }
}
