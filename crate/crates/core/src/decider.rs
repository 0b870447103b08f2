//! Reversibility decision over the minimized reachability tree.
//!
//! Interior node values do not depend on their level, so the distinct nodes
//! at level `ℓ + 1` are a function of the distinct nodes at level `ℓ`. The
//! sequence of these frontiers is therefore eventually periodic: once
//! `frontier(q + p) = frontier(q)` every later frontier is known, and the
//! frontier at level `n − 3` can be indexed directly for any `n`. Only the
//! last three levels, which carry the wrap-around filters, are expanded per
//! `n`.
//!
//! Every edge is checked against the counts a complete tree must have
//! (`d²` up to level `n−3`, `d` at `n−2`, `1` at `n−1`); the first edge that
//! disagrees is the witness.

use std::collections::HashMap;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::reachability::{LevelClass, TreeNode};
use crate::rule::Rule;

/// Default cap on distinct interior node values (and on distinct frontiers).
pub const DEFAULT_NODE_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Reversible,
    Irreversible,
}

/// Why a verdict was reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Some state occurs other than `d²` times in the rule table.
    Unbalanced { histogram: Vec<usize> },
    /// The `edge_state`-edge leaving `node` at `level` carries `found` RMTs
    /// where a complete tree needs `expected`.
    Cardinality {
        level: usize,
        node: TreeNode,
        edge_state: u8,
        found: usize,
        expected: usize,
    },
    /// Every edge down to level `n − 1` carries the required count.
    Complete,
}

/// Frontier bookkeeping that backs a verdict.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureInfo {
    /// Preperiod `q` and period `p` of the frontier sequence, when the cycle
    /// closes at or before level `n − 3`.
    pub preperiod: Option<usize>,
    pub period: Option<usize>,
    /// Distinct interior nodes per level, up to level `n − 3` or the cycle.
    pub frontier_sizes: Vec<usize>,
    /// Distinct nodes at levels `n − 2` and `n − 1`, when expanded.
    pub final_sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub rule: Rule,
    pub n: usize,
    pub outcome: Outcome,
    pub witness: Witness,
    pub closure: ClosureInfo,
}

impl Verdict {
    pub fn is_reversible(&self) -> bool {
        self.outcome == Outcome::Reversible
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecideOptions {
    pub node_budget: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct InteriorViolation {
    level: usize,
    node: usize,
    edge_state: u8,
    found: usize,
}

/// Incrementally built frontier sequence of one rule.
pub struct Explorer<'a> {
    rule: &'a Rule,
    budget: usize,
    fail_fast: bool,
    nodes: Vec<TreeNode>,
    ids: HashMap<TreeNode, usize>,
    frontiers: Vec<Vec<usize>>,
    seen_frontiers: HashMap<Vec<usize>, usize>,
    cycle: Option<(usize, usize)>,
    violation: Option<InteriorViolation>,
}

impl<'a> Explorer<'a> {
    /// Stops growing at the first interior edge with a count other than `d²`.
    pub fn new(rule: &'a Rule, options: DecideOptions) -> Self {
        Self::build(rule, options, true)
    }

    /// Grows until the frontier sequence cycles, whatever the counts.
    pub fn exhaustive(rule: &'a Rule, options: DecideOptions) -> Self {
        Self::build(rule, options, false)
    }

    fn build(rule: &'a Rule, options: DecideOptions, fail_fast: bool) -> Self {
        let root = TreeNode::root(rule.states());
        let mut ex = Explorer {
            rule,
            budget: options.node_budget,
            fail_fast,
            nodes: vec![root.clone()],
            ids: HashMap::from([(root, 0)]),
            frontiers: vec![vec![0]],
            seen_frontiers: HashMap::from([(vec![0], 0)]),
            cycle: None,
            violation: None,
        };
        ex.check_new_nodes(0, 0);
        ex
    }

    fn done(&self) -> bool {
        self.cycle.is_some() || (self.fail_fast && self.violation.is_some())
    }

    /// Builds frontiers up to `level`, unless the sequence cycles or (in
    /// fail-fast mode) a violation turns up first.
    pub fn extend_to(&mut self, level: usize) -> Result<()> {
        while self.frontiers.len() <= level && !self.done() {
            self.advance()?;
        }
        Ok(())
    }

    /// Builds frontiers until the sequence cycles.
    pub fn close(&mut self) -> Result<()> {
        while !self.done() {
            self.advance()?;
        }
        Ok(())
    }

    fn advance(&mut self) -> Result<()> {
        let states = self.rule.states();
        let level = self.frontiers.len() - 1;
        let first_new = self.nodes.len();
        let mut next = Vec::new();
        for i in 0..self.frontiers[level].len() {
            let id = self.frontiers[level][i];
            for m in 0..self.rule.d() as u8 {
                let child = self.nodes[id]
                    .edge_label(self.rule, m)
                    .child(states, LevelClass::Interior);
                if child.is_empty() {
                    continue;
                }
                let child_id = match self.ids.get(&child) {
                    Some(&c) => c,
                    None => {
                        if self.nodes.len() >= self.budget {
                            return Err(Error::Budget {
                                what: "reachability node",
                                needed: self.nodes.len() as u128 + 1,
                                budget: self.budget as u128,
                            });
                        }
                        let c = self.nodes.len();
                        self.ids.insert(child.clone(), c);
                        self.nodes.push(child);
                        c
                    }
                };
                next.push(child_id);
            }
        }
        next.sort_unstable();
        next.dedup();
        if let Some(&q) = self.seen_frontiers.get(&next) {
            self.cycle = Some((q, level + 1 - q));
            return Ok(());
        }
        if self.frontiers.len() >= self.budget {
            return Err(Error::Budget {
                what: "frontier",
                needed: self.frontiers.len() as u128 + 1,
                budget: self.budget as u128,
            });
        }
        self.seen_frontiers.insert(next.clone(), level + 1);
        self.frontiers.push(next);
        self.check_new_nodes(level + 1, first_new);
        Ok(())
    }

    // Nodes created while building `level` first appear there; older ones
    // were checked at an earlier level.
    fn check_new_nodes(&mut self, level: usize, first_new: usize) {
        if self.violation.is_some() {
            return;
        }
        let want = self.rule.states().pairs();
        for &id in &self.frontiers[level] {
            if id < first_new {
                continue;
            }
            for label in self.nodes[id].edge_labels(self.rule) {
                let found = label.rmt_count();
                if found != want {
                    self.violation = Some(InteriorViolation {
                        level,
                        node: id,
                        edge_state: label.state(),
                        found,
                    });
                    return;
                }
            }
        }
    }

    /// `(q, p)` once known.
    pub fn cycle(&self) -> Option<(usize, usize)> {
        self.cycle
    }

    pub fn levels_built(&self) -> usize {
        self.frontiers.len()
    }

    pub fn frontier(&self, level: usize) -> Vec<TreeNode> {
        self.frontiers[level]
            .iter()
            .map(|&id| self.nodes[id].clone())
            .collect()
    }

    /// Index into the stored frontiers that equals `frontier(level)`.
    fn frontier_index(&self, level: usize) -> usize {
        if level < self.frontiers.len() {
            return level;
        }
        let (q, p) = self
            .cycle
            .expect("frontier beyond the built prefix needs the cycle");
        q + (level - q) % p
    }

    /// The verdict for `n` cells using only frontiers `0..=n−3`.
    fn evaluate(&self, n: usize, finals: &FinalCheck) -> Verdict {
        let target = n - 3;
        let d = self.rule.d();
        let mut closure = ClosureInfo::default();
        let built = self.frontiers.len().min(target + 1);
        closure.frontier_sizes = self.frontiers[..built].iter().map(Vec::len).collect();
        if let Some((q, p)) = self.cycle {
            if q + p <= target {
                closure.preperiod = Some(q);
                closure.period = Some(p);
            }
        }
        if let Some(v) = self.violation {
            if v.level <= target {
                closure.frontier_sizes.truncate(v.level + 1);
                return Verdict {
                    rule: self.rule.clone(),
                    n,
                    outcome: Outcome::Irreversible,
                    witness: Witness::Cardinality {
                        level: v.level,
                        node: self.nodes[v.node].clone(),
                        edge_state: v.edge_state,
                        found: v.found,
                        expected: d * d,
                    },
                    closure,
                };
            }
        }
        closure.final_sizes = finals.sizes.clone();
        let (outcome, witness) = match &finals.violation {
            None => (Outcome::Reversible, Witness::Complete),
            Some(f) => (
                Outcome::Irreversible,
                Witness::Cardinality {
                    level: n - f.from_end,
                    node: f.node.clone(),
                    edge_state: f.edge_state,
                    found: f.found,
                    expected: f.expected,
                },
            ),
        };
        Verdict {
            rule: self.rule.clone(),
            n,
            outcome,
            witness,
            closure,
        }
    }

    fn final_check(&self, level: usize) -> FinalCheck {
        let index = self.frontier_index(level);
        final_levels(
            self.rule,
            self.frontiers[index].iter().map(|&id| &self.nodes[id]),
        )
    }
}

#[derive(Clone, Debug)]
struct FinalViolation {
    // 2 for level n−2, 1 for level n−1
    from_end: usize,
    node: TreeNode,
    edge_state: u8,
    found: usize,
    expected: usize,
}

#[derive(Clone, Debug, Default)]
struct FinalCheck {
    sizes: Vec<usize>,
    violation: Option<FinalViolation>,
}

/// Expands level `n−3` through the two filtered levels.
fn final_levels<'n>(rule: &Rule, frontier: impl Iterator<Item = &'n TreeNode>) -> FinalCheck {
    let states = rule.states();
    let d = states.get();
    let mut check = FinalCheck::default();

    let mut penultimate = IndexSet::new();
    for node in frontier {
        for label in node.edge_labels(rule) {
            let child = label.child(states, LevelClass::Penultimate);
            if !child.is_empty() {
                penultimate.insert(child);
            }
        }
    }
    check.sizes.push(penultimate.len());

    let mut last = IndexSet::new();
    for node in &penultimate {
        for label in node.edge_labels(rule) {
            if label.rmt_count() != d {
                check.violation = Some(FinalViolation {
                    from_end: 2,
                    node: node.clone(),
                    edge_state: label.state(),
                    found: label.rmt_count(),
                    expected: d,
                });
                return check;
            }
            last.insert(label.child(states, LevelClass::Final));
        }
    }
    check.sizes.push(last.len());

    for node in &last {
        for label in node.edge_labels(rule) {
            if label.rmt_count() != 1 {
                check.violation = Some(FinalViolation {
                    from_end: 1,
                    node: node.clone(),
                    edge_state: label.state(),
                    found: label.rmt_count(),
                    expected: 1,
                });
                return check;
            }
        }
    }
    check
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        Err(Error::CellCount(n))
    } else {
        Ok(())
    }
}

fn unbalanced(rule: &Rule, n: usize) -> Verdict {
    Verdict {
        rule: rule.clone(),
        n,
        outcome: Outcome::Irreversible,
        witness: Witness::Unbalanced {
            histogram: rule.histogram(),
        },
        closure: ClosureInfo::default(),
    }
}

/// Decides whether the `n`-cell automaton of `rule` is reversible.
pub fn decide(rule: &Rule, n: usize) -> Result<Verdict> {
    decide_with(rule, n, DecideOptions::default())
}

pub fn decide_with(rule: &Rule, n: usize, options: DecideOptions) -> Result<Verdict> {
    check_n(n)?;
    if !rule.is_balanced() {
        return Ok(unbalanced(rule, n));
    }
    let mut explorer = Explorer::new(rule, options);
    explorer.extend_to(n - 3)?;
    let finals = match explorer.violation {
        Some(v) if v.level <= n - 3 => FinalCheck::default(),
        _ => explorer.final_check(n - 3),
    };
    Ok(explorer.evaluate(n, &finals))
}

/// Verdicts for every `n` in `lo..=hi`, sharing one frontier sequence.
pub fn decide_range(rule: &Rule, lo: usize, hi: usize) -> Result<Vec<Verdict>> {
    decide_range_with(rule, lo, hi, DecideOptions::default(), Execution::default())
}

pub fn decide_range_with(
    rule: &Rule,
    lo: usize,
    hi: usize,
    options: DecideOptions,
    exec: Execution,
) -> Result<Vec<Verdict>> {
    check_n(lo)?;
    if lo > hi {
        return Err(Error::EmptyRange { lo, hi });
    }
    if !rule.is_balanced() {
        return Ok((lo..=hi).map(|n| unbalanced(rule, n)).collect());
    }
    let mut explorer = Explorer::new(rule, options);
    explorer.extend_to(hi - 3)?;

    // levels n−3 that actually need the final expansion, keyed by the stored
    // frontier they resolve to
    let mut wanted: Vec<usize> = Vec::new();
    for n in lo..=hi {
        let blocked = matches!(explorer.violation, Some(v) if v.level <= n - 3);
        if !blocked {
            let idx = explorer.frontier_index(n - 3);
            if !wanted.contains(&idx) {
                wanted.push(idx);
            }
        }
    }
    let checks = exec::map(exec, &wanted, |&idx| explorer.final_check(idx));
    let by_index: HashMap<usize, FinalCheck> = wanted.into_iter().zip(checks).collect();
    let empty = FinalCheck::default();
    Ok((lo..=hi)
        .map(|n| {
            let blocked = matches!(explorer.violation, Some(v) if v.level <= n - 3);
            let finals = if blocked {
                &empty
            } else {
                &by_index[&explorer.frontier_index(n - 3)]
            };
            explorer.evaluate(n, finals)
        })
        .collect())
}

/// Decides one `n` for many rules.
pub fn decide_batch(rules: &[Rule], n: usize, exec: Execution) -> Result<Vec<Verdict>> {
    exec::map(exec, rules, |r| decide(r, n))
        .into_iter()
        .collect()
}

/// The eventually periodic sequence of distinct interior nodes per level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontierSequence {
    /// `frontier(0), …, frontier(q + p − 1)`.
    pub levels: Vec<Vec<TreeNode>>,
    pub preperiod: usize,
    pub period: usize,
}

impl FrontierSequence {
    /// `frontier(level)` for any level.
    pub fn frontier(&self, level: usize) -> &[TreeNode] {
        let idx = if level < self.levels.len() {
            level
        } else {
            self.preperiod + (level - self.preperiod) % self.period
        };
        &self.levels[idx]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

/// Frontiers until the first repeat, for any rule (counts are not checked).
pub fn frontier_closure(rule: &Rule) -> Result<FrontierSequence> {
    frontier_closure_with(rule, DecideOptions::default())
}

pub fn frontier_closure_with(rule: &Rule, options: DecideOptions) -> Result<FrontierSequence> {
    let mut explorer = Explorer::exhaustive(rule, options);
    explorer.close()?;
    let (preperiod, period) = explorer.cycle.expect("close() ends on a cycle");
    Ok(FrontierSequence {
        levels: (0..explorer.levels_built())
            .map(|l| explorer.frontier(l))
            .collect(),
        preperiod,
        period,
    })
}
