//! States, RMT arithmetic, equivalent/sibling sets and the rule table.
//!
//! An RMT (rule min term) is a neighbourhood `(x, y, z)` packed as
//! `r = x·d² + y·d + z`. Rules are written as `d³` symbols with `f[0]`
//! rightmost, so `"201210210201210210201210210"` has `f[0] = 0` and
//! `f[26] = 2`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rmt_set::RmtSet;

/// Largest supported number of states; `6³ = 216` fits [`RmtSet`].
pub const MAX_STATES: usize = 6;

/// Number of states per cell, `2 ≤ d ≤ MAX_STATES`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct States(u8);

/// A neighbourhood `(left, centre, right)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Neighborhood {
    pub left: u8,
    pub center: u8,
    pub right: u8,
}

impl States {
    pub fn new(d: usize) -> Result<Self> {
        if (2..=MAX_STATES).contains(&d) {
            Ok(States(d as u8))
        } else {
            Err(Error::StateCount(d))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// `d²`: number of de Bruijn vertices, and of equivalent/sibling sets.
    #[inline]
    pub fn pairs(self) -> usize {
        self.get() * self.get()
    }

    /// `d³`: number of RMTs.
    #[inline]
    pub fn rmts(self) -> usize {
        self.pairs() * self.get()
    }

    pub fn all_rmts(self) -> RmtSet {
        RmtSet::range(0, self.rmts())
    }

    pub fn check_state(self, s: usize) -> Result<u8> {
        if s < self.get() {
            Ok(s as u8)
        } else {
            Err(Error::StateOutOfRange {
                state: s,
                d: self.get(),
            })
        }
    }

    pub fn decompose(self, r: usize) -> Result<Neighborhood> {
        let d = self.get();
        if r >= self.rmts() {
            return Err(Error::RmtOutOfRange { rmt: r, d });
        }
        Ok(Neighborhood {
            left: (r / (d * d)) as u8,
            center: ((r / d) % d) as u8,
            right: (r % d) as u8,
        })
    }

    #[inline]
    pub fn compose(self, nb: Neighborhood) -> usize {
        let d = self.get();
        nb.left as usize * d * d + nb.center as usize * d + nb.right as usize
    }

    fn check_set_index(self, index: usize) -> Result<()> {
        if index < self.pairs() {
            Ok(())
        } else {
            Err(Error::SetIndexOutOfRange {
                index,
                d: self.get(),
            })
        }
    }

    /// `Equi_i = {i, d²+i, …, (d−1)d²+i}`: the RMTs entering de Bruijn vertex `i`.
    pub fn equi_set(self, i: usize) -> Result<RmtSet> {
        self.check_set_index(i)?;
        Ok((0..self.get()).map(|a| a * self.pairs() + i).collect())
    }

    /// `Sibl_j = {d·j, …, d·j+d−1}`: the RMTs leaving de Bruijn vertex `j`.
    pub fn sibl_set(self, j: usize) -> Result<RmtSet> {
        self.check_set_index(j)?;
        let d = self.get();
        Ok(RmtSet::range(d * j, d * j + d))
    }

    /// RMTs that can follow `r` in a walk: `(d·r + t) mod d³`, the sibling
    /// set of `r mod d²`.
    #[inline]
    pub fn successors(self, r: usize) -> RmtSet {
        let d = self.get();
        let j = r % self.pairs();
        RmtSet::range(d * j, d * j + d)
    }
}

impl fmt::Display for States {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A local rule `f: S³ → S` stored as its next-state table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    states: States,
    table: Box<[u8]>,
    // preimages[m] = { r : f[r] = m }
    preimages: Box<[RmtSet]>,
}

impl Rule {
    /// Builds a rule from `table[r] = f[r]`.
    pub fn new(states: States, table: Vec<u8>) -> Result<Self> {
        if table.len() != states.rmts() {
            return Err(Error::parse(
                table.len(),
                format!("expected {} entries, got {}", states.rmts(), table.len()),
            ));
        }
        let mut preimages = vec![RmtSet::empty(); states.get()];
        for (r, &v) in table.iter().enumerate() {
            states.check_state(v as usize)?;
            preimages[v as usize].insert(r);
        }
        Ok(Rule {
            states,
            table: table.into_boxed_slice(),
            preimages: preimages.into_boxed_slice(),
        })
    }

    pub fn from_fn(states: States, f: impl Fn(Neighborhood) -> u8) -> Result<Self> {
        let table = (0..states.rmts())
            .map(|r| f(states.decompose(r).expect("r < d³")))
            .collect();
        Rule::new(states, table)
    }

    /// `f(x, y, z) = y`.
    pub fn identity(states: States) -> Self {
        Rule::from_fn(states, |nb| nb.center).expect("identity is a valid rule")
    }

    pub fn constant(states: States, value: u8) -> Result<Self> {
        states.check_state(value as usize)?;
        Rule::new(states, vec![value; states.rmts()])
    }

    #[inline]
    pub fn states(&self) -> States {
        self.states
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.states.get()
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    /// `f[r]`.
    #[inline]
    pub fn next_state(&self, r: usize) -> u8 {
        self.table[r]
    }

    #[inline]
    pub fn apply(&self, left: u8, center: u8, right: u8) -> u8 {
        let d = self.d();
        self.table[(left as usize * d + center as usize) * d + right as usize]
    }

    /// `{ r : f[r] = m }`.
    #[inline]
    pub fn preimage(&self, m: u8) -> RmtSet {
        self.preimages[m as usize]
    }

    /// Occurrences of each state in the table.
    pub fn histogram(&self) -> Vec<usize> {
        self.preimages.iter().map(RmtSet::len).collect()
    }

    /// Every state occurs exactly `d²` times.
    pub fn is_balanced(&self) -> bool {
        let want = self.states.pairs();
        self.preimages.iter().all(|p| p.len() == want)
    }

    /// Parses the digit form (`d³` digits, `f[0]` rightmost) or the
    /// comma-separated form (`d³` integers, same order).
    pub fn parse(text: &str, states: States) -> Result<Self> {
        let table = parse_symbols(text, states, Some(states.rmts()))?;
        let mut table = table;
        table.reverse();
        Rule::new(states, table)
    }

    /// Digit form; `Rule::parse(&r.to_digits(), d) == r`.
    pub fn to_digits(&self) -> String {
        self.table
            .iter()
            .rev()
            .map(|&v| char::from_digit(v as u32, 10).expect("d ≤ 10"))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let parts: Vec<String> = self.table.iter().rev().map(|v| v.to_string()).collect();
        parts.join(",")
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_digits())
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rule(d={}, {})", self.states, self.to_digits())
    }
}

/// Serialized as `{ "d": 3, "rule": "201…" }`.
impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Rule", 2)?;
        s.serialize_field("d", &self.d())?;
        s.serialize_field("rule", &self.to_digits())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for Rule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            d: usize,
            rule: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        let states = States::new(raw.d).map_err(serde::de::Error::custom)?;
        Rule::parse(&raw.rule, states).map_err(serde::de::Error::custom)
    }
}

/// Shared by rules and configurations: digits or comma-separated integers,
/// each `< d`, in textual order.
pub(crate) fn parse_symbols(text: &str, states: States, len: Option<usize>) -> Result<Vec<u8>> {
    let text = text.trim();
    let d = states.get();
    let mut out = Vec::with_capacity(text.len());
    if text.contains(',') {
        let mut pos = 0;
        for field in text.split(',') {
            let lead = field.len() - field.trim_start().len();
            let trimmed = field.trim();
            let v: usize = trimmed
                .parse()
                .map_err(|_| Error::parse(pos + lead, format!("malformed field {trimmed:?}")))?;
            if v >= d {
                return Err(Error::parse(pos + lead, format!("symbol {v} is not < {d}")));
            }
            out.push(v as u8);
            pos += field.len() + 1;
        }
    } else {
        for (pos, ch) in text.chars().enumerate() {
            match ch.to_digit(10) {
                Some(v) if (v as usize) < d => out.push(v as u8),
                Some(v) => return Err(Error::parse(pos, format!("symbol {v} is not < {d}"))),
                None => return Err(Error::parse(pos, format!("unexpected character {ch:?}"))),
            }
        }
    }
    if let Some(want) = len {
        if out.len() != want {
            return Err(Error::parse(
                out.len().min(want),
                format!("expected {want} symbols, got {}", out.len()),
            ));
        }
    }
    Ok(out)
}
