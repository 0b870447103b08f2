//! Injectivity on the bi-infinite lattice, via the pair graph of the de
//! Bruijn graph.
//!
//! The pair graph has a vertex for every ordered pair `(u, v)` of de Bruijn
//! vertices and an edge `(u, v) → (u', v')` whenever `u → u'` and `v → v'`
//! are de Bruijn edges with the same output. Two bi-infinite configurations
//! with the same image are a bi-infinite walk in it; they differ iff the walk
//! leaves the diagonal. A bi-infinite walk through a vertex exists iff the
//! vertex is reachable from a cycle and reaches a cycle, so the rule is
//! injective iff no off-diagonal vertex has both properties.

use std::collections::VecDeque;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::decider::{decide_range_with, DecideOptions, Outcome};
use crate::error::Result;
use crate::evolution::DeBruijnGraph;
use crate::exec::{self, Execution};
use crate::rule::{Rule, States};

/// A vertex of the pair graph: two de Bruijn vertices `xy`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairVertex {
    pub left: usize,
    pub right: usize,
}

impl PairVertex {
    pub fn is_diagonal(&self) -> bool {
        self.left == self.right
    }

    pub fn label(&self, states: States) -> String {
        let d = states.get();
        format!(
            "({}{},{}{})",
            self.left / d,
            self.left % d,
            self.right / d,
            self.right % d
        )
    }
}

/// The matched-output product of a rule's de Bruijn graph with itself.
pub struct PairGraph {
    states: States,
    graph: DiGraph<PairVertex, ()>,
    // on_cycle[i]: vertex i lies in a strongly connected component with a cycle
    on_cycle: Vec<bool>,
}

impl PairGraph {
    pub fn new(rule: &Rule) -> Self {
        let states = rule.states();
        let db = DeBruijnGraph::new(rule);
        let pairs = states.pairs();
        let mut graph = DiGraph::with_capacity(pairs * pairs, pairs * pairs * states.get());
        for left in 0..pairs {
            for right in 0..pairs {
                graph.add_node(PairVertex { left, right });
            }
        }
        for u in 0..pairs {
            for v in 0..pairs {
                for a in db.out_edges(u) {
                    for b in db.out_edges(v) {
                        if a.output == b.output {
                            graph.add_edge(
                                NodeIndex::new(u * pairs + v),
                                NodeIndex::new(a.to * pairs + b.to),
                                (),
                            );
                        }
                    }
                }
            }
        }
        let mut on_cycle = vec![false; graph.node_count()];
        for component in tarjan_scc(&graph) {
            let cyclic = component.len() > 1 || graph.contains_edge(component[0], component[0]);
            if cyclic {
                for ix in component {
                    on_cycle[ix.index()] = true;
                }
            }
        }
        PairGraph {
            states,
            graph,
            on_cycle,
        }
    }

    fn index(&self, p: PairVertex) -> usize {
        p.left * self.states.pairs() + p.right
    }

    fn vertex(&self, i: usize) -> PairVertex {
        self.graph[NodeIndex::new(i)]
    }

    pub fn has_edge(&self, from: PairVertex, to: PairVertex) -> bool {
        self.graph.contains_edge(
            NodeIndex::new(self.index(from)),
            NodeIndex::new(self.index(to)),
        )
    }

    /// Lies on some closed walk.
    pub fn on_cycle(&self, p: PairVertex) -> bool {
        self.on_cycle[self.index(p)]
    }

    fn neighbors(&self, i: usize, dir: petgraph::Direction) -> impl Iterator<Item = usize> + '_ {
        self.graph
            .neighbors_directed(NodeIndex::new(i), dir)
            .map(|n| n.index())
    }

    /// Vertices reachable (in direction `dir`) from any cyclic vertex.
    fn touched_by_cycles(&self, dir: petgraph::Direction) -> Vec<bool> {
        let mut seen = self.on_cycle.clone();
        let mut queue: VecDeque<usize> = (0..seen.len()).filter(|&i| seen[i]).collect();
        while let Some(i) = queue.pop_front() {
            for j in self.neighbors(i, dir) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen
    }

    /// Shortest path from `from` to the first vertex satisfying `goal`
    /// (in direction `dir`), excluding the trivial path unless `allow_start`.
    fn bfs(
        &self,
        from: usize,
        dir: petgraph::Direction,
        goal: impl Fn(usize) -> bool,
        allow_start: bool,
    ) -> Option<Vec<usize>> {
        if allow_start && goal(from) {
            return Some(vec![from]);
        }
        let mut parent = vec![usize::MAX; self.graph.node_count()];
        let mut queue = VecDeque::from([from]);
        while let Some(i) = queue.pop_front() {
            let mut next: Vec<usize> = self.neighbors(i, dir).collect();
            next.sort_unstable();
            for j in next {
                if parent[j] != usize::MAX || (j == from && !goal(j)) {
                    continue;
                }
                parent[j] = i;
                if goal(j) {
                    let mut path = vec![j];
                    let mut k = i;
                    while k != from {
                        path.push(k);
                        k = parent[k];
                    }
                    path.push(from);
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(j);
            }
        }
        None
    }

    /// A closed walk `v → … → v` (first vertex repeated at the end).
    fn cycle_through(&self, v: usize) -> Vec<usize> {
        self.bfs(v, petgraph::Direction::Outgoing, |j| j == v, false)
            .expect("vertex lies on a cycle")
    }
}

/// Two distinct bi-infinite configurations with one image: repeat
/// `entry_cycle` forever to the left, walk `path`, then repeat `exit_cycle`
/// forever to the right. `path` starts on `entry_cycle[0]`, ends on
/// `exit_cycle[0]` and passes the off-diagonal vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonInjectivityWitness {
    pub off_diagonal: PairVertex,
    pub entry_cycle: Vec<PairVertex>,
    pub path: Vec<PairVertex>,
    pub exit_cycle: Vec<PairVertex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectivityReport {
    pub injective: bool,
    pub witness: Option<NonInjectivityWitness>,
}

impl fmt::Display for InjectivityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.injective {
            write!(f, "injective")
        } else {
            write!(f, "not injective")
        }
    }
}

pub fn infinite_injective(rule: &Rule) -> InjectivityReport {
    use petgraph::Direction::{Incoming, Outgoing};
    let pg = PairGraph::new(rule);
    let from_cycle = pg.touched_by_cycles(Outgoing);
    let to_cycle = pg.touched_by_cycles(Incoming);
    let candidates: Vec<usize> = (0..from_cycle.len())
        .filter(|&i| !pg.vertex(i).is_diagonal() && from_cycle[i] && to_cycle[i])
        .collect();
    let Some(&w) = candidates
        .iter()
        .find(|&&i| pg.on_cycle[i])
        .or_else(|| candidates.first())
    else {
        return InjectivityReport {
            injective: true,
            witness: None,
        };
    };

    let is_cyclic = |j: usize| pg.on_cycle[j];
    // backwards from w to a cyclic vertex, then forwards to another
    let mut lead: Vec<usize> = pg
        .bfs(w, Incoming, is_cyclic, true)
        .expect("w is reachable from a cycle");
    lead.reverse();
    let tail = pg
        .bfs(w, Outgoing, is_cyclic, true)
        .expect("w reaches a cycle");
    let entry = lead[0];
    let exit = *tail.last().expect("non-empty path");
    let mut path = lead;
    path.extend_from_slice(&tail[1..]);

    let to_vertices = |ids: &[usize]| ids.iter().map(|&i| pg.vertex(i)).collect::<Vec<_>>();
    InjectivityReport {
        injective: false,
        witness: Some(NonInjectivityWitness {
            off_diagonal: pg.vertex(w),
            entry_cycle: to_vertices(&pg.cycle_through(entry)),
            path: to_vertices(&path),
            exit_cycle: to_vertices(&pg.cycle_through(exit)),
        }),
    }
}

/// One rule's row in a [`ConjectureReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureEntry {
    pub rule: Rule,
    pub infinite_injective: bool,
    /// `(n, outcome)` for every tested ring length.
    pub verdicts: Vec<(usize, Outcome)>,
}

impl ConjectureEntry {
    pub fn reversible_for_some_n(&self) -> bool {
        self.verdicts.iter().any(|(_, o)| *o == Outcome::Reversible)
    }

    pub fn irreversible_for_some_n(&self) -> bool {
        self.verdicts
            .iter()
            .any(|(_, o)| *o == Outcome::Irreversible)
    }
}

/// Empirical evidence for "injective on the infinite lattice ⇒ reversible on
/// every ring", and for the failure of the converse. Nothing here is a proof.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConjectureReport {
    pub n_lo: usize,
    pub n_hi: usize,
    pub entries: Vec<ConjectureEntry>,
}

impl ConjectureReport {
    /// Infinite-injective yet irreversible for some tested `n`.
    pub fn counterexamples(&self) -> Vec<&ConjectureEntry> {
        self.entries
            .iter()
            .filter(|e| e.infinite_injective && e.irreversible_for_some_n())
            .collect()
    }

    /// Reversible for some tested `n` but not infinite-injective.
    pub fn finite_only(&self) -> Vec<&ConjectureEntry> {
        self.entries
            .iter()
            .filter(|e| !e.infinite_injective && e.reversible_for_some_n())
            .collect()
    }
}

pub fn conjecture_experiment(
    rules: impl IntoIterator<Item = Rule>,
    n_lo: usize,
    n_hi: usize,
    exec: Execution,
) -> Result<ConjectureReport> {
    let rules: Vec<Rule> = rules.into_iter().collect();
    let entries = exec::map(exec, &rules, |rule| -> Result<ConjectureEntry> {
        let verdicts = decide_range_with(
            rule,
            n_lo,
            n_hi,
            DecideOptions::default(),
            Execution::Sequential,
        )?
        .into_iter()
        .map(|v| (v.n, v.outcome))
        .collect();
        Ok(ConjectureEntry {
            rule: rule.clone(),
            infinite_injective: infinite_injective(rule).injective,
            verdicts,
        })
    });
    Ok(ConjectureReport {
        n_lo,
        n_hi,
        entries: entries.into_iter().collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(text: &str, d: usize) -> Rule {
        Rule::parse(text, States::new(d).unwrap()).unwrap()
    }

    fn check_witness(rule: &Rule, w: &NonInjectivityWitness) {
        let pg = PairGraph::new(rule);
        let walk_ok = |vs: &[PairVertex]| vs.windows(2).all(|p| pg.has_edge(p[0], p[1]));
        assert!(walk_ok(&w.entry_cycle));
        assert!(walk_ok(&w.exit_cycle));
        assert!(walk_ok(&w.path));
        assert_eq!(w.entry_cycle.first(), w.entry_cycle.last());
        assert_eq!(w.exit_cycle.first(), w.exit_cycle.last());
        assert!(w.entry_cycle.len() >= 2 && w.exit_cycle.len() >= 2);
        assert_eq!(w.path.first(), w.entry_cycle.first());
        assert_eq!(w.path.last(), w.exit_cycle.first());
        assert!(!w.off_diagonal.is_diagonal());
        assert!(w.path.contains(&w.off_diagonal));
    }

    #[test]
    fn rev_rule_rule_is_injective() {
        let r = infinite_injective(&rule("201210210201210210201210210", 3));
        assert!(r.injective);
        assert_eq!(r.witness, None);
    }

    #[test]
    fn odd_only_rule_is_not_injective() {
        let r = rule("102221010102221010102221010", 3);
        let report = infinite_injective(&r);
        assert!(!report.injective);
        check_witness(&r, &report.witness.unwrap());
        // the alternating pair (10, 01) loops back to itself in two steps
        let pg = PairGraph::new(&r);
        let p = PairVertex { left: 3, right: 1 };
        let q = PairVertex { left: 1, right: 3 };
        assert!(pg.has_edge(p, q) && pg.has_edge(q, p));
        assert!(pg.on_cycle(p));
    }

    #[test]
    fn identity_is_injective() {
        for d in 2..=4 {
            assert!(infinite_injective(&Rule::identity(States::new(d).unwrap())).injective);
        }
    }

    #[test]
    fn pair_graph_is_symmetric() {
        let r = rule("102221010102221010102221010", 3);
        let pg = PairGraph::new(&r);
        for a in 0..9 {
            for b in 0..9 {
                for c in 0..9 {
                    for e in 0..9 {
                        let p = |l, r| PairVertex { left: l, right: r };
                        assert_eq!(pg.has_edge(p(a, b), p(c, e)), pg.has_edge(p(b, a), p(e, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn eca_witnesses_are_well_formed() {
        let s2 = States::new(2).unwrap();
        for code in 0u32..256 {
            let table = (0..8).map(|r| ((code >> r) & 1) as u8).collect();
            let r = Rule::new(s2, table).unwrap();
            if let Some(w) = infinite_injective(&r).witness {
                check_witness(&r, &w);
            }
        }
    }

    #[test]
    fn empty_experiment() {
        let report = conjecture_experiment(Vec::new(), 3, 10, Execution::Sequential).unwrap();
        assert!(report.entries.is_empty());
        assert!(report.counterexamples().is_empty());
    }

    #[test]
    fn odd_rule_is_finite_only() {
        let r = rule("102221010102221010102221010", 3);
        let report = conjecture_experiment(vec![r.clone()], 3, 8, Execution::default()).unwrap();
        assert_eq!(report.finite_only().len(), 1);
        assert_eq!(report.finite_only()[0].rule, r);
        assert!(report.counterexamples().is_empty());
    }
}
