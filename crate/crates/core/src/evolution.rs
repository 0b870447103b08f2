//! Configurations, the de Bruijn graph of a rule, and evolution on a ring.
//!
//! A configuration is written with cell 0 leftmost. The successor is read off
//! a closed de Bruijn walk that starts at vertex `(c[0], c[1])`: cell `i` of
//! the result is `f(c[i], c[i+1], c[i+2])` (indices mod n). This is the
//! alignment used by the reachability tree, where the edge taken at level `i`
//! is the state of cell `i`. The textbook centred map (cell `i` reads
//! `(c[i−1], c[i], c[i+1])`) is the same map rotated by one cell and is
//! available as [`Alignment::Centered`].

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::rule::{parse_symbols, Rule, States};

/// A cyclic word of `n ≥ 3` cell states.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    states: States,
    cells: Vec<u8>,
}

impl Configuration {
    pub fn new(states: States, cells: Vec<u8>) -> Result<Self> {
        if cells.len() < 3 {
            return Err(Error::CellCount(cells.len()));
        }
        for &c in &cells {
            states.check_state(c as usize)?;
        }
        Ok(Configuration { states, cells })
    }

    /// Digits (`1012`) or comma-separated integers, cell 0 first.
    pub fn parse(text: &str, states: States) -> Result<Self> {
        Configuration::new(states, parse_symbols(text, states, None)?)
    }

    /// Inverse of [`Configuration::index`].
    pub fn from_index(states: States, n: usize, mut index: u64) -> Self {
        let d = states.get() as u64;
        let mut cells = vec![0u8; n];
        for c in cells.iter_mut().rev() {
            *c = (index % d) as u8;
            index /= d;
        }
        Configuration { states, cells }
    }

    /// Base-d value with cell 0 most significant, so index order is
    /// lexicographic order.
    pub fn index(&self) -> u64 {
        let d = self.states.get() as u64;
        self.cells.iter().fold(0, |acc, &c| acc * d + c as u64)
    }

    pub fn states(&self) -> States {
        self.states
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn to_digits(&self) -> String {
        self.cells
            .iter()
            .map(|&c| char::from_digit(c as u32, 10).expect("d ≤ 10"))
            .collect()
    }

    /// Rotates left by `k` cells.
    pub fn rotated(&self, k: usize) -> Self {
        let mut cells = self.cells.clone();
        let n = cells.len();
        cells.rotate_left(k % n);
        Configuration {
            states: self.states,
            cells,
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_digits())
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({})", self.to_digits())
    }
}

/// Which neighbourhood feeds cell `i` of the successor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Alignment {
    /// `f(c[i], c[i+1], c[i+2])`, the de Bruijn walk order.
    #[default]
    Window,
    /// `f(c[i−1], c[i], c[i+1])`.
    Centered,
}

fn check_states(rule: &Rule, c: &Configuration) -> Result<()> {
    if rule.states() != c.states() {
        let bad = c.cells().iter().copied().max().unwrap_or(0) as usize;
        // a d=2 configuration is valid for a d=3 rule; the converse is not
        return rule.states().check_state(bad).map(|_| ());
    }
    Ok(())
}

/// One synchronous update under periodic boundary, window alignment.
pub fn step(rule: &Rule, c: &Configuration) -> Result<Configuration> {
    step_aligned(rule, c, Alignment::Window)
}

pub fn step_aligned(rule: &Rule, c: &Configuration, alignment: Alignment) -> Result<Configuration> {
    check_states(rule, c)?;
    let cells = c.cells();
    let n = cells.len();
    let offset = match alignment {
        Alignment::Window => 0,
        Alignment::Centered => n - 1,
    };
    let next = (0..n)
        .map(|i| {
            let i = i + offset;
            rule.apply(cells[i % n], cells[(i + 1) % n], cells[(i + 2) % n])
        })
        .collect();
    Ok(Configuration {
        states: rule.states(),
        cells: next,
    })
}

/// An edge of the de Bruijn graph: RMT `r = xyz` runs from vertex `xy` to
/// vertex `yz` and emits `f[r]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeBruijnEdge {
    pub rmt: usize,
    pub from: usize,
    pub to: usize,
    pub output: u8,
}

/// The order-2 de Bruijn graph over `d` symbols labelled by a rule.
#[derive(Clone, Debug)]
pub struct DeBruijnGraph {
    states: States,
    // out[v] in ascending RMT order
    out: Vec<Vec<DeBruijnEdge>>,
}

impl DeBruijnGraph {
    pub fn new(rule: &Rule) -> Self {
        let s = rule.states();
        let d = s.get();
        let mut out = vec![Vec::with_capacity(d); s.pairs()];
        for r in 0..s.rmts() {
            let from = r / d;
            out[from].push(DeBruijnEdge {
                rmt: r,
                from,
                to: r % s.pairs(),
                output: rule.next_state(r),
            });
        }
        DeBruijnGraph { states: s, out }
    }

    pub fn states(&self) -> States {
        self.states
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn out_edges(&self, v: usize) -> &[DeBruijnEdge] {
        &self.out[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = &DeBruijnEdge> {
        self.out.iter().flatten()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges().filter(|e| e.to == v).count()
    }

    pub fn vertex_label(&self, v: usize) -> String {
        let d = self.states.get();
        format!("{}{}", v / d, v % d)
    }

    pub fn edge_label(&self, e: &DeBruijnEdge) -> String {
        let nb = self.states.decompose(e.rmt).expect("edge RMT in range");
        format!("{}{}{}/{}", nb.left, nb.center, nb.right, e.output)
    }

    /// Successor of `c` by walking the closed path of overlapping windows,
    /// starting at vertex `(c[0], c[1])`.
    pub fn walk(&self, c: &Configuration) -> Result<Configuration> {
        let d = self.states.get();
        let cells = c.cells();
        let n = cells.len();
        for &x in cells {
            self.states.check_state(x as usize)?;
        }
        let mut vertex = cells[0] as usize * d + cells[1] as usize;
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let target = (vertex % d) * d + cells[(i + 2) % n] as usize;
            let edge = self.out[vertex]
                .iter()
                .find(|e| e.to == target)
                .expect("de Bruijn vertex has an edge to every overlap");
            next.push(edge.output);
            vertex = edge.to;
        }
        debug_assert_eq!(vertex, cells[0] as usize * d + cells[1] as usize);
        Configuration::new(self.states, next)
    }

    /// Graphviz rendering; vertices `00…`, edges labelled `xyz/v`, both in
    /// ascending order.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph debruijn {\n");
        for v in 0..self.vertex_count() {
            let _ = writeln!(s, "  \"{}\";", self.vertex_label(v));
        }
        for e in self.edges() {
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                self.vertex_label(e.from),
                self.vertex_label(e.to),
                self.edge_label(e)
            );
        }
        s.push_str("}\n");
        s
    }
}

pub fn build_debruijn(rule: &Rule) -> DeBruijnGraph {
    DeBruijnGraph::new(rule)
}

pub fn export_dot(graph: &DeBruijnGraph) -> String {
    graph.to_dot()
}

/// Trajectory from an initial configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// `c₀, c₁, …` up to the first repeat (exclusive) or `t_max`.
    pub configurations: Vec<Configuration>,
    pub cycle: Option<Cycle>,
}

/// `c[entry + period] = c[entry]`, with both minimal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub entry: usize,
    pub period: usize,
}

impl Cycle {
    /// Step at which the repeat was observed.
    pub fn repeat_step(&self) -> usize {
        self.entry + self.period
    }
}

pub fn orbit(rule: &Rule, c: &Configuration, t_max: usize) -> Result<Orbit> {
    orbit_aligned(rule, c, t_max, Alignment::Window)
}

pub fn orbit_aligned(
    rule: &Rule,
    c: &Configuration,
    t_max: usize,
    alignment: Alignment,
) -> Result<Orbit> {
    check_states(rule, c)?;
    let mut seen: HashMap<Configuration, usize> = HashMap::new();
    let mut configurations = vec![c.clone()];
    seen.insert(c.clone(), 0);
    let mut current = c.clone();
    for t in 1..=t_max {
        current = step_aligned(rule, &current, alignment)?;
        if let Some(&entry) = seen.get(&current) {
            return Ok(Orbit {
                configurations,
                cycle: Some(Cycle {
                    entry,
                    period: t - entry,
                }),
            });
        }
        seen.insert(current.clone(), t);
        configurations.push(current.clone());
    }
    Ok(Orbit {
        configurations,
        cycle: None,
    })
}
