//! Candidate families of balanced rules.
//!
//! * Strategy I: every equivalent set `Equi_i` gets a permutation of the
//!   states across its `d` members, `(d!)^{d²}` rules.
//! * Strategy II: every sibling set `Sibl_j` gets a permutation of the
//!   states, `(d!)^{d²}` rules.
//! * Strategy III: each sibling set is constant. Within block `x` (the sets
//!   `Sibl_{x·d}, …, Sibl_{x·d+d−1}`) either all sets share one value, so
//!   `f(x,y,z) = π(x)` for a permutation `π` (`d!` rules), or the sets carry
//!   pairwise different values, so `f(x,y,z) = σ_x(y)` (`(d!)^d` rules).
//!
//! Each family is a mixed-radix index space over permutations; index `i`
//! decodes to a rule in `O(d³)`, so families can be streamed or sampled
//! without enumeration.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rule::{Rule, States};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    I,
    II,
    III,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" | "i" | "1" => Ok(Strategy::I),
            "II" | "ii" | "2" => Ok(Strategy::II),
            "III" | "iii" | "3" => Ok(Strategy::III),
            other => Err(Error::parse(0, format!("unknown strategy {other:?}"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::I => "I",
            Strategy::II => "II",
            Strategy::III => "III",
        })
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Number of balanced `d`-state rules: `(d³)! / ((d²)!)^d`.
pub fn count_balanced(states: States) -> BigUint {
    let d = states.get();
    factorial(states.rmts()) / factorial(states.pairs()).pow(d as u32)
}

/// All permutations of `0..d` in lexicographic order.
fn permutations(d: usize) -> Vec<Vec<u8>> {
    fn rec(prefix: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v as u8);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(d), &mut vec![false; d], &mut out);
    out
}

/// One strategy's index space for a given `d`.
#[derive(Clone, Debug)]
pub struct Family {
    strategy: Strategy,
    states: States,
    perms: Vec<Vec<u8>>,
}

impl Family {
    pub fn new(strategy: Strategy, states: States) -> Self {
        Family {
            strategy,
            states,
            perms: permutations(states.get()),
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn states(&self) -> States {
        self.states
    }

    fn radix(&self) -> usize {
        self.perms.len()
    }

    /// Number of permutation digits in a (block-B) index.
    fn width(&self) -> usize {
        match self.strategy {
            Strategy::I | Strategy::II => self.states.pairs(),
            Strategy::III => self.states.get(),
        }
    }

    fn arm_a_size(&self) -> usize {
        match self.strategy {
            Strategy::III => self.radix(),
            _ => 0,
        }
    }

    pub fn size(&self) -> BigUint {
        BigUint::from(self.radix()).pow(self.width() as u32) + BigUint::from(self.arm_a_size())
    }

    /// Builds the rule for digit vector `digits` (least significant first);
    /// for Strategy III `arm_a` selects the `π(x)` arm with `digits[0] = π`.
    fn build(&self, arm_a: bool, digits: &[usize]) -> Rule {
        let s = self.states;
        let d = s.get();
        let dd = s.pairs();
        let mut table = vec![0u8; s.rmts()];
        match self.strategy {
            Strategy::I => {
                for (i, &p) in digits.iter().enumerate() {
                    for a in 0..d {
                        table[a * dd + i] = self.perms[p][a];
                    }
                }
            }
            Strategy::II => {
                for (j, &p) in digits.iter().enumerate() {
                    for t in 0..d {
                        table[d * j + t] = self.perms[p][t];
                    }
                }
            }
            Strategy::III if arm_a => {
                let pi = &self.perms[digits[0]];
                for (r, v) in table.iter_mut().enumerate() {
                    *v = pi[r / dd];
                }
            }
            Strategy::III => {
                for (r, v) in table.iter_mut().enumerate() {
                    *v = self.perms[digits[r / dd]][(r / d) % d];
                }
            }
        }
        Rule::new(s, table).expect("family rules are valid")
    }

    /// The rule at `index`, or `None` past the end.
    pub fn rule_at(&self, index: &BigUint) -> Option<Rule> {
        if *index >= self.size() {
            return None;
        }
        let a = BigUint::from(self.arm_a_size());
        if *index < a {
            let p = index.to_usize().expect("< d!");
            return Some(self.build(true, &[p]));
        }
        let mut rest = index - a;
        let radix = BigUint::from(self.radix());
        let mut digits = Vec::with_capacity(self.width());
        for _ in 0..self.width() {
            let digit = (&rest % &radix).to_usize().expect("< d!");
            digits.push(digit);
            rest /= &radix;
        }
        Some(self.build(false, &digits))
    }

    /// Every rule of the family, in index order.
    pub fn iter(&self) -> FamilyIter {
        self.clone().into_iter()
    }

    fn random_rule(&self, rng: &mut impl Rng, seen: &mut HashSet<Vec<usize>>) -> Option<Rule> {
        let arm_a = self.arm_a_size() > 0 && {
            let size = self.size().to_u64().expect("Strategy III sizes fit u64");
            rng.random_range(0..size) < self.arm_a_size() as u64
        };
        let digits: Vec<usize> = if arm_a {
            vec![rng.random_range(0..self.radix())]
        } else {
            (0..self.width())
                .map(|_| rng.random_range(0..self.radix()))
                .collect()
        };
        let mut key = digits.clone();
        key.push(arm_a as usize);
        seen.insert(key).then(|| self.build(arm_a, &digits))
    }
}

impl IntoIterator for Family {
    type Item = Rule;
    type IntoIter = FamilyIter;

    fn into_iter(self) -> FamilyIter {
        let width = self.width();
        FamilyIter {
            family: self,
            arm_a: 0,
            digits: vec![0; width],
            done: false,
        }
    }
}

pub struct FamilyIter {
    family: Family,
    arm_a: usize,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for FamilyIter {
    type Item = Rule;

    fn next(&mut self) -> Option<Rule> {
        if self.arm_a < self.family.arm_a_size() {
            self.arm_a += 1;
            return Some(self.family.build(true, &[self.arm_a - 1]));
        }
        if self.done {
            return None;
        }
        let rule = self.family.build(false, &self.digits);
        let radix = self.family.radix();
        self.done = true;
        for digit in self.digits.iter_mut() {
            *digit += 1;
            if *digit < radix {
                self.done = false;
                break;
            }
            *digit = 0;
        }
        Some(rule)
    }
}

/// Streams every rule of a strategy's family, in index order.
pub fn enumerate_strategy(strategy: Strategy, states: States) -> FamilyIter {
    Family::new(strategy, states).into_iter()
}

/// A seed-deterministic sample of distinct family members.
#[derive(Clone, Debug)]
pub struct Sample {
    pub rules: Vec<Rule>,
    /// The request exceeded the family size; `rules` is the whole family.
    pub clipped: bool,
    pub family_size: BigUint,
}

/// Up to `count` distinct rules drawn uniformly from the family.
pub fn sample_strategy(strategy: Strategy, states: States, count: usize, seed: u64) -> Sample {
    let family = Family::new(strategy, states);
    let size = family.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if BigUint::from(count) >= size {
        return Sample {
            rules: family.iter().collect(),
            clipped: BigUint::from(count) > size,
            family_size: size,
        };
    }
    let rules = match size.to_usize() {
        // dense request: draw indices without replacement
        Some(total) if count.saturating_mul(2) > total => {
            rand::seq::index::sample(&mut rng, total, count)
                .into_iter()
                .map(|i| family.rule_at(&BigUint::from(i)).expect("index < size"))
                .collect()
        }
        _ => {
            let mut seen = HashSet::with_capacity(count);
            let mut rules = Vec::with_capacity(count);
            while rules.len() < count {
                if let Some(r) = family.random_rule(&mut rng, &mut seen) {
                    rules.push(r);
                }
            }
            rules
        }
    };
    Sample {
        rules,
        clipped: false,
        family_size: size,
    }
}

/// A uniformly random balanced rule.
pub fn random_balanced_rule(states: States, rng: &mut impl Rng) -> Rule {
    let d = states.get();
    let mut table: Vec<u8> = (0..states.rmts()).map(|r| (r % d) as u8).collect();
    table.shuffle(rng);
    Rule::new(states, table).expect("shuffled balanced table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize) -> States {
        States::new(n).unwrap()
    }

    fn contains(strategy: Strategy, n: usize, text: &str) -> bool {
        let target = Rule::parse(text, d(n)).unwrap();
        enumerate_strategy(strategy, d(n)).any(|r| r == target)
    }

    #[test]
    fn balanced_counts() {
        assert_eq!(count_balanced(d(2)), BigUint::from(70u32));
        // 27! / (9!)³, evaluated independently with u128 prime-power bookkeeping
        let expected: u128 = {
            let mut num: Vec<u128> = (1..=27).collect();
            for _ in 0..3 {
                for k in 2..=9u128 {
                    let mut k = k;
                    for x in num.iter_mut() {
                        let g = gcd(*x, k);
                        *x /= g;
                        k /= g;
                        if k == 1 {
                            break;
                        }
                    }
                    assert_eq!(k, 1);
                }
            }
            num.iter().product()
        };
        assert_eq!(count_balanced(d(3)), BigUint::from(expected));
        assert_eq!(expected, 227_873_431_500);

        let s2 = d(2);
        let scanned = (0u32..256)
            .filter(|code| {
                let table = (0..8).map(|r| ((code >> r) & 1) as u8).collect();
                Rule::new(s2, table).unwrap().is_balanced()
            })
            .count();
        assert_eq!(scanned, 70);
    }

    fn gcd(a: u128, b: u128) -> u128 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn family_sizes_by_enumeration() {
        for strategy in [Strategy::I, Strategy::II] {
            let rules: Vec<Rule> = enumerate_strategy(strategy, d(2)).collect();
            assert_eq!(rules.len(), 16);
            let distinct: HashSet<String> = rules.iter().map(Rule::to_digits).collect();
            assert_eq!(distinct.len(), 16);
            assert_eq!(Family::new(strategy, d(2)).size(), BigUint::from(16u32));
        }
        let rules: Vec<Rule> = enumerate_strategy(Strategy::III, d(3)).collect();
        let distinct: HashSet<String> = rules.iter().map(Rule::to_digits).collect();
        assert_eq!(rules.len(), 222);
        assert_eq!(distinct.len(), 222);
        assert_eq!(
            Family::new(Strategy::III, d(3)).size(),
            BigUint::from(222u32)
        );
        assert_eq!(
            Family::new(Strategy::I, d(3)).size(),
            BigUint::from(10_077_696u64)
        );
    }

    #[test]
    fn strategy_i_d3_is_exact() {
        let mut count = 0u64;
        for rule in enumerate_strategy(Strategy::I, d(3)) {
            count += 1;
            if count.is_multiple_of(100_003) {
                assert!(rule.is_balanced());
            }
        }
        assert_eq!(count, 6u64.pow(9));
    }

    #[test]
    fn every_member_is_balanced_and_structured() {
        for n in 2..=3 {
            let s = d(n);
            for strategy in [Strategy::I, Strategy::II, Strategy::III] {
                for rule in Family::new(strategy, s).iter().take(5000) {
                    assert!(rule.is_balanced(), "{strategy} {rule}");
                    for i in 0..s.pairs() {
                        let equi: HashSet<u8> = s
                            .equi_set(i)
                            .unwrap()
                            .iter()
                            .map(|r| rule.next_state(r))
                            .collect();
                        let sibl: HashSet<u8> = s
                            .sibl_set(i)
                            .unwrap()
                            .iter()
                            .map(|r| rule.next_state(r))
                            .collect();
                        match strategy {
                            Strategy::I => assert_eq!(equi.len(), n),
                            Strategy::II => assert_eq!(sibl.len(), n),
                            Strategy::III => assert_eq!(sibl.len(), 1),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn example_rules_are_members() {
        assert!(contains(Strategy::I, 3, "222222222111111111000000000"));
        assert!(contains(Strategy::II, 3, "120120210120120210120120210"));
        assert!(contains(Strategy::II, 3, "102120210102120210102120210"));
        assert!(contains(Strategy::II, 3, "120021210120021210120021210"));
        assert!(contains(Strategy::III, 3, "222111000222111000222111000"));
        assert!(contains(Strategy::III, 3, "222000111222111000222111000"));
    }

    #[test]
    fn strategies_i_and_ii_overlap() {
        // f = x + z (mod 3) permutes both every equivalent and every sibling set
        let both = Rule::from_fn(d(3), |nb| (nb.left + nb.right) % 3).unwrap();
        assert!(contains(Strategy::I, 3, &both.to_digits()));
        assert!(contains(Strategy::II, 3, &both.to_digits()));
    }

    #[test]
    fn rule_at_matches_iteration() {
        for strategy in [Strategy::I, Strategy::II, Strategy::III] {
            let family = Family::new(strategy, d(2));
            for (i, rule) in family.iter().enumerate() {
                assert_eq!(family.rule_at(&BigUint::from(i)), Some(rule));
            }
            assert_eq!(family.rule_at(&family.size()), None);
        }
        let family = Family::new(Strategy::I, d(5));
        let last = family.size() - 1u32;
        assert!(family.rule_at(&last).unwrap().is_balanced());
    }

    #[test]
    fn sampling() {
        let a = sample_strategy(Strategy::I, d(3), 50, 42);
        let b = sample_strategy(Strategy::I, d(3), 50, 42);
        assert_eq!(a.rules, b.rules);
        assert!(!a.clipped);
        assert_eq!(a.rules.iter().collect::<HashSet<_>>().len(), 50);
        assert!(a.rules.iter().all(Rule::is_balanced));

        let full = sample_strategy(Strategy::I, d(2), 16, 1);
        assert!(!full.clipped);
        assert_eq!(
            full.rules,
            enumerate_strategy(Strategy::I, d(2)).collect::<Vec<_>>()
        );
        let over = sample_strategy(Strategy::I, d(2), 40, 1);
        assert!(over.clipped);
        assert_eq!(over.rules.len(), 16);

        let dense = sample_strategy(Strategy::III, d(2), 5, 3);
        assert_eq!(dense.rules.iter().collect::<HashSet<_>>().len(), 5);
        let big = sample_strategy(Strategy::II, d(5), 3, 9);
        assert!(big.rules.iter().all(Rule::is_balanced));
        let iii = sample_strategy(Strategy::III, d(6), 20, 9);
        assert_eq!(iii.rules.len(), 20);
    }

    #[test]
    fn random_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=6 {
            assert!(random_balanced_rule(d(n), &mut rng).is_balanced());
        }
    }

    #[test]
    fn parse_strategy() {
        assert_eq!("II".parse::<Strategy>().unwrap(), Strategy::II);
        assert_eq!("3".parse::<Strategy>().unwrap(), Strategy::III);
        assert!("IV".parse::<Strategy>().is_err());
    }
}
