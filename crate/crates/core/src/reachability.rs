//! Reachability-tree nodes and edge labels.
//!
//! A node is a tuple of `d²` RMT sets `(Γ₀, …, Γ_{d²−1})`. Set index `k`
//! names the first two cells `(x₀, x₁)` of a candidate predecessor; after
//! `i` edges, `Γ_k` holds the windows `(x_i, x_{i+1}, x_{i+2})` of every
//! predecessor prefix starting with `k` whose image matches the edge states
//! taken so far. RMT counts below are always summed over the `d²` sets: the
//! same RMT held under two different set indices stands for two different
//! partial predecessors.

use std::fmt;
use std::sync::OnceLock;

use crate::rmt_set::RmtSet;
use crate::rule::{Rule, States, MAX_STATES};

/// Where a node sits relative to the ring length `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LevelClass {
    /// Levels `0..=n−3`.
    Interior,
    /// Level `n−2`: the window of set `s` must end on cell 0, i.e.
    /// `r mod d = ⌊s/d⌋`.
    Penultimate,
    /// Level `n−1`: the window of set `k` must be `(x_{n−1}, k)`, i.e.
    /// `r mod d² = k`.
    Final,
    /// Level `n`.
    Leaf,
}

impl LevelClass {
    pub fn of(level: usize, n: usize) -> LevelClass {
        assert!(
            n >= 3 && level <= n,
            "level {level} outside a tree of {n} cells"
        );
        if level + 3 <= n {
            LevelClass::Interior
        } else if level + 2 == n {
            LevelClass::Penultimate
        } else if level + 1 == n {
            LevelClass::Final
        } else {
            LevelClass::Leaf
        }
    }
}

struct Filters {
    penultimate: Vec<RmtSet>,
    last: Vec<RmtSet>,
}

fn filters(states: States) -> &'static Filters {
    static CACHE: OnceLock<Vec<Filters>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        (2..=MAX_STATES)
            .map(|d| {
                let s = States::new(d).expect("supported d");
                let penultimate = (0..s.pairs())
                    .map(|set| (0..s.rmts()).filter(|r| r % d == set / d).collect())
                    .collect();
                let last = (0..s.pairs())
                    .map(|k| s.equi_set(k).expect("k < d²"))
                    .collect();
                Filters { penultimate, last }
            })
            .collect()
    });
    &all[states.get() - 2]
}

fn total(sets: &[RmtSet]) -> usize {
    sets.iter().map(RmtSet::len).sum()
}

fn write_sets(f: &mut fmt::Formatter<'_>, sets: &[RmtSet]) -> fmt::Result {
    for (k, s) in sets.iter().enumerate() {
        if k > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{s}")?;
    }
    Ok(())
}

/// A reachability-tree node. Equality and hashing are over the whole tuple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeNode {
    sets: Box<[RmtSet]>,
}

impl TreeNode {
    /// `Γ_k = Sibl_k` for every `k`.
    pub fn root(states: States) -> TreeNode {
        let sets = (0..states.pairs())
            .map(|k| states.sibl_set(k).expect("k < d²"))
            .collect();
        TreeNode { sets }
    }

    /// The non-reachable node.
    pub fn empty(states: States) -> TreeNode {
        TreeNode {
            sets: vec![RmtSet::empty(); states.pairs()].into_boxed_slice(),
        }
    }

    pub fn from_sets(sets: Vec<RmtSet>) -> TreeNode {
        TreeNode {
            sets: sets.into_boxed_slice(),
        }
    }

    pub fn sets(&self) -> &[RmtSet] {
        &self.sets
    }

    pub fn set(&self, k: usize) -> RmtSet {
        self.sets[k]
    }

    /// `Σ_k |Γ_k|`.
    pub fn rmt_count(&self) -> usize {
        total(&self.sets)
    }

    pub fn union(&self) -> RmtSet {
        self.sets.iter().fold(RmtSet::empty(), |acc, s| acc | *s)
    }

    pub fn is_empty(&self) -> bool {
        self.sets.iter().all(RmtSet::is_empty)
    }

    /// The label of the `m`-edge: `Γ_k^E = { r ∈ Γ_k : f[r] = m }`.
    pub fn edge_label(&self, rule: &Rule, m: u8) -> EdgeLabel {
        let pre = rule.preimage(m);
        EdgeLabel {
            sets: self.sets.iter().map(|s| *s & pre).collect(),
            state: m,
        }
    }

    pub fn edge_labels(&self, rule: &Rule) -> Vec<EdgeLabel> {
        (0..rule.d() as u8)
            .map(|m| self.edge_label(rule, m))
            .collect()
    }

    /// Number of RMTs per next state, summed over the sets.
    pub fn state_histogram(&self, rule: &Rule) -> Vec<usize> {
        (0..rule.d() as u8)
            .map(|m| {
                let pre = rule.preimage(m);
                self.sets.iter().map(|s| (*s & pre).len()).sum()
            })
            .collect()
    }

    /// Equal RMT counts for every next state.
    pub fn is_balanced(&self, rule: &Rule) -> bool {
        let h = self.state_histogram(rule);
        h.iter().all(|&c| c == h[0])
    }

    /// Every set is a union of whole sibling sets.
    pub fn is_sibling_closed(&self, states: States) -> bool {
        let d = states.get();
        self.sets.iter().all(|s| {
            s.iter()
                .all(|r| states.sibl_set(r / d).expect("r < d³").is_subset(s))
        })
    }
}

/// `[0,1,2] [3,4,5] … []`: the `d²` sets in index order.
impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sets(f, &self.sets)
    }
}

impl fmt::Debug for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeNode(")?;
        write_sets(f, &self.sets)?;
        write!(f, ")")
    }
}

/// Label of the `m`-edge leaving a node.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeLabel {
    sets: Box<[RmtSet]>,
    state: u8,
}

impl EdgeLabel {
    pub fn sets(&self) -> &[RmtSet] {
        &self.sets
    }

    /// The `m` of this `m`-edge.
    pub fn state(&self) -> u8 {
        self.state
    }

    pub fn rmt_count(&self) -> usize {
        total(&self.sets)
    }

    pub fn union(&self) -> RmtSet {
        self.sets.iter().fold(RmtSet::empty(), |acc, s| acc | *s)
    }

    pub fn is_empty(&self) -> bool {
        self.sets.iter().all(RmtSet::is_empty)
    }

    /// The node this edge leads to, with the level filter for `class`.
    pub fn child(&self, states: States, class: LevelClass) -> TreeNode {
        let mut sets: Vec<RmtSet> = self
            .sets
            .iter()
            .map(|s| {
                s.iter()
                    .fold(RmtSet::empty(), |acc, r| acc | states.successors(r))
            })
            .collect();
        match class {
            LevelClass::Interior | LevelClass::Leaf => {}
            LevelClass::Penultimate => {
                for (s, mask) in sets.iter_mut().zip(&filters(states).penultimate) {
                    *s &= *mask;
                }
            }
            LevelClass::Final => {
                for (s, mask) in sets.iter_mut().zip(&filters(states).last) {
                    *s &= *mask;
                }
            }
        }
        TreeNode::from_sets(sets)
    }
}

impl fmt::Debug for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeLabel({}: ", self.state)?;
        write_sets(f, &self.sets)?;
        write!(f, ")")
    }
}

/// RMTs an edge at `level` must carry in a complete tree of `n` cells:
/// `d²` up to level `n−3`, `d` at `n−2`, `1` at `n−1`.
pub fn expected_edge_count(states: States, level: usize, n: usize) -> usize {
    match LevelClass::of(level, n) {
        LevelClass::Interior => states.pairs(),
        LevelClass::Penultimate => states.get(),
        LevelClass::Final => 1,
        LevelClass::Leaf => panic!("leaves have no outgoing edges"),
    }
}

/// RMTs a node at `level` holds in a complete tree: `d³` up to `n−3`, `d²`
/// at `n−2`, `d` at `n−1` and `n`.
pub fn expected_node_count(states: States, level: usize, n: usize) -> usize {
    match LevelClass::of(level, n) {
        LevelClass::Interior => states.rmts(),
        LevelClass::Penultimate => states.pairs(),
        LevelClass::Final | LevelClass::Leaf => states.get(),
    }
}

/// An edge whose RMT count differs from what a complete tree requires.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CardinalityViolation {
    pub found: usize,
    pub expected: usize,
}

pub fn check_edge_cardinality(
    label: &EdgeLabel,
    states: States,
    level: usize,
    n: usize,
) -> Result<(), CardinalityViolation> {
    let expected = expected_edge_count(states, level, n);
    let found = label.rmt_count();
    if found == expected {
        Ok(())
    } else {
        Err(CardinalityViolation { found, expected })
    }
}

/// Follows edge states `path` from the root of the `n`-cell tree. The node
/// reached by `path = [m₀, …, m_{i−1}]` is `N_{i.j}` with `j` the base-d
/// reading of the path.
pub fn node_at(rule: &Rule, n: usize, path: &[u8]) -> TreeNode {
    let states = rule.states();
    let mut node = TreeNode::root(states);
    for (level, &m) in path.iter().enumerate() {
        node = node
            .edge_label(rule, m)
            .child(states, LevelClass::of(level + 1, n));
    }
    node
}

/// Distinct non-empty node values per level `0..=n`.
pub fn distinct_levels(rule: &Rule, n: usize) -> Vec<Vec<TreeNode>> {
    let states = rule.states();
    let mut levels = vec![vec![TreeNode::root(states)]];
    for level in 0..n {
        let class = LevelClass::of(level + 1, n);
        let mut next = indexmap::IndexSet::new();
        for node in &levels[level] {
            for label in node.edge_labels(rule) {
                let child = label.child(states, class);
                if !child.is_empty() {
                    next.insert(child);
                }
            }
        }
        levels.push(next.into_iter().collect());
    }
    levels
}

/// Number of non-empty nodes in the full (unminimized) tree.
pub fn full_tree_node_count(rule: &Rule, n: usize) -> u128 {
    use std::collections::HashMap;
    fn count(
        rule: &Rule,
        n: usize,
        level: usize,
        node: &TreeNode,
        memo: &mut HashMap<(usize, TreeNode), u128>,
    ) -> u128 {
        if node.is_empty() {
            return 0;
        }
        if level == n {
            return 1;
        }
        if let Some(&c) = memo.get(&(level, node.clone())) {
            return c;
        }
        let class = LevelClass::of(level + 1, n);
        let mut c = 1;
        for label in node.edge_labels(rule) {
            c += count(rule, n, level + 1, &label.child(rule.states(), class), memo);
        }
        memo.insert((level, node.clone()), c);
        c
    }
    count(
        rule,
        n,
        0,
        &TreeNode::root(rule.states()),
        &mut HashMap::new(),
    )
}
