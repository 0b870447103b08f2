//! Brute-force ground truth: evaluate the global map on all `dⁿ`
//! configurations and count predecessors.

use std::sync::atomic::{AtomicU32, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Configuration;
use crate::exec::{self, Execution};
use crate::rule::Rule;

pub const DEFAULT_ORACLE_BUDGET: u64 = 10_000_000;

const CHUNK: u64 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalMapSummary {
    pub n: usize,
    pub d: usize,
    /// Distinct successors.
    pub image_size: u64,
    /// Largest number of predecessors of a single configuration.
    pub max_indegree: u32,
    pub bijective: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    /// Largest `dⁿ` the oracle will enumerate.
    pub budget: u64,
    pub exec: Execution,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            budget: DEFAULT_ORACLE_BUDGET,
            exec: Execution::default(),
        }
    }
}

fn configuration_count(rule: &Rule, n: usize, budget: u64) -> Result<u64> {
    if n < 3 {
        return Err(Error::CellCount(n));
    }
    let total = (rule.d() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(Error::Budget {
            what: "oracle configuration",
            needed: total,
            budget: budget as u128,
        });
    }
    Ok(total as u64)
}

/// Successor of configuration `index`, as an index. Same alignment as
/// [`crate::evolution::step`].
#[inline]
fn image(rule: &Rule, n: usize, index: u64, cells: &mut [u8]) -> u64 {
    let d = rule.d() as u64;
    let mut x = index;
    for c in cells.iter_mut().rev() {
        *c = (x % d) as u8;
        x /= d;
    }
    let mut out = 0u64;
    for i in 0..n {
        let v = rule.apply(cells[i], cells[(i + 1) % n], cells[(i + 2) % n]);
        out = out * d + v as u64;
    }
    out
}

/// Predecessor count of every configuration.
fn indegrees(rule: &Rule, n: usize, options: OracleOptions) -> Result<Vec<u32>> {
    let total = configuration_count(rule, n, options.budget)?;
    let counts: Vec<AtomicU32> = (0..total).map(|_| AtomicU32::new(0)).collect();
    exec::map_chunks(options.exec, total, CHUNK, |range| {
        let mut cells = vec![0u8; n];
        for idx in range {
            let img = image(rule, n, idx, &mut cells);
            counts[img as usize].fetch_add(1, Ordering::Relaxed);
        }
    });
    Ok(counts.into_iter().map(AtomicU32::into_inner).collect())
}

pub fn oracle_is_reversible(rule: &Rule, n: usize) -> Result<GlobalMapSummary> {
    oracle_with(rule, n, OracleOptions::default())
}

pub fn oracle_with(rule: &Rule, n: usize, options: OracleOptions) -> Result<GlobalMapSummary> {
    let counts = indegrees(rule, n, options)?;
    let image_size = counts.iter().filter(|&&c| c > 0).count() as u64;
    let max_indegree = counts.iter().copied().max().unwrap_or(0);
    Ok(GlobalMapSummary {
        n,
        d: rule.d(),
        image_size,
        max_indegree,
        bijective: image_size == counts.len() as u64,
    })
}

/// Up to `limit` configurations without a predecessor, in lexicographic order.
pub fn find_nonreachable(rule: &Rule, n: usize, limit: usize) -> Result<Vec<Configuration>> {
    find_nonreachable_with(rule, n, limit, OracleOptions::default())
}

pub fn find_nonreachable_with(
    rule: &Rule,
    n: usize,
    limit: usize,
    options: OracleOptions,
) -> Result<Vec<Configuration>> {
    let counts = indegrees(rule, n, options)?;
    Ok(counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 0)
        .take(limit)
        .map(|(idx, _)| Configuration::from_index(rule.states(), n, idx as u64))
        .collect())
}

/// The image of the global map as a sorted list of configuration indices.
pub fn image_indices(rule: &Rule, n: usize) -> Result<Vec<u64>> {
    let counts = indegrees(rule, n, OracleOptions::default())?;
    Ok(counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, _)| i as u64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::step;
    use crate::rule::States;

    fn rule(text: &str, d: usize) -> Rule {
        Rule::parse(text, States::new(d).unwrap()).unwrap()
    }

    #[test]
    fn identity_is_bijective() {
        let s = oracle_is_reversible(&rule("11001100", 2), 5).unwrap();
        assert!(s.bijective);
        assert_eq!(s.image_size, 32);
        assert_eq!(s.max_indegree, 1);
    }

    #[test]
    fn irrev_rule_is_not_bijective() {
        let r = rule("201012210201012210201012210", 3);
        let s = oracle_is_reversible(&r, 4).unwrap();
        assert!(!s.bijective);
        assert!(s.image_size < 81);
        assert!(s.max_indegree > 1);
        let gardens = find_nonreachable(&r, 4, 1000).unwrap();
        assert_eq!(gardens.len() as u64, 81 - s.image_size);
        // confirm by a direct scan of all 81 configurations
        let images: Vec<Configuration> = (0..81)
            .map(|i| step(&r, &Configuration::from_index(r.states(), 4, i)).unwrap())
            .collect();
        for g in &gardens {
            assert!(!images.contains(g));
        }
        assert!(gardens.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rev_rule_is_bijective() {
        let s = oracle_is_reversible(&rule("201210210201210210201210210", 3), 4).unwrap();
        assert!(s.bijective);
        assert_eq!(s.image_size, 81);
        assert!(
            find_nonreachable(&rule("201210210201210210201210210", 3), 4, 10)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn constant_zero() {
        let r = rule("00000000", 2);
        let g = find_nonreachable(&r, 3, 100).unwrap();
        let digits: Vec<String> = g.iter().map(|c| c.to_digits()).collect();
        assert_eq!(digits, ["001", "010", "011", "100", "101", "110", "111"]);
        let s = oracle_is_reversible(&r, 3).unwrap();
        assert_eq!((s.image_size, s.max_indegree), (1, 8));
    }

    #[test]
    fn budget() {
        let r = rule("11001100", 2);
        let opts = OracleOptions {
            budget: 1000,
            ..Default::default()
        };
        assert!(oracle_with(&r, 10, opts).unwrap_err().is_budget());
        assert!(oracle_with(&r, 9, opts).is_ok());
    }

    #[test]
    fn partitioning_does_not_matter() {
        let r = rule("201012210201012210201012210", 3);
        let seq = oracle_with(
            &r,
            9,
            OracleOptions {
                exec: Execution::Sequential,
                ..Default::default()
            },
        );
        let par = oracle_with(
            &r,
            9,
            OracleOptions {
                exec: Execution::Parallel,
                ..Default::default()
            },
        );
        assert_eq!(seq, par);
    }

    #[test]
    fn summary_invariant_on_all_eca() {
        let s2 = States::new(2).unwrap();
        for code in 0u32..256 {
            let table = (0..8).map(|r| ((code >> r) & 1) as u8).collect();
            let r = Rule::new(s2, table).unwrap();
            for n in 3..=8 {
                let s = oracle_is_reversible(&r, n).unwrap();
                assert!(s.image_size <= 1 << n);
                assert_eq!(s.bijective, s.max_indegree == 1);
                assert_eq!(s.bijective, s.image_size == 1 << n);
            }
        }
    }
}
