use carev::oracle::image_indices;
use carev::reachability::{LevelClass, TreeNode};
use carev::strategies::random_balanced_rule;
use carev::Strategy as RuleFamily;
use carev::{
    decide, decide_batch, decide_range, oracle_is_reversible, sample_strategy, Execution, Rule,
    States,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn states(d: usize) -> States {
    States::new(d).unwrap()
}

/// Indices of configurations whose leaf in the `n`-cell tree is non-empty.
fn tree_image(rule: &Rule, n: usize) -> Vec<u64> {
    fn walk(rule: &Rule, n: usize, node: TreeNode, level: usize, prefix: u64, out: &mut Vec<u64>) {
        if node.is_empty() {
            return;
        }
        if level == n {
            out.push(prefix);
            return;
        }
        for label in node.edge_labels(rule) {
            let child = label.child(rule.states(), LevelClass::of(level + 1, n));
            let index = prefix * rule.d() as u64 + label.state() as u64;
            walk(rule, n, child, level + 1, index, out);
        }
    }
    let mut out = Vec::new();
    walk(rule, n, TreeNode::root(rule.states()), 0, 0, &mut out);
    out
}

fn eca(code: u32) -> Rule {
    Rule::new(states(2), (0..8).map(|r| ((code >> r) & 1) as u8).collect()).unwrap()
}

#[test]
fn tree_leaves_are_the_image() {
    for code in 0..256 {
        let r = eca(code);
        for n in 3..=10 {
            assert_eq!(
                tree_image(&r, n),
                image_indices(&r, n).unwrap(),
                "rule {r}, n={n}"
            );
        }
    }
}

#[test]
fn tree_leaves_are_the_image_d3() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let r = random_balanced_rule(states(3), &mut rng);
        for n in 3..=6 {
            assert_eq!(
                tree_image(&r, n),
                image_indices(&r, n).unwrap(),
                "rule {r}, n={n}"
            );
        }
    }
}

#[test]
fn strategy_i_level_one_covers_every_rmt_once() {
    for d in [2, 3, 4] {
        let s = states(d);
        for r in sample_strategy(RuleFamily::I, s, 100, 3).rules {
            let root = TreeNode::root(s);
            for label in root.edge_labels(&r) {
                let child = label.child(s, LevelClass::Interior);
                assert_eq!(child.rmt_count(), s.rmts(), "rule {r}");
                assert_eq!(child.union(), s.all_rmts(), "rule {r}");
            }
        }
    }
}

#[test]
fn batch_modes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let rules: Vec<Rule> = (0..200)
        .map(|_| random_balanced_rule(states(3), &mut rng))
        .collect();
    let seq = decide_batch(&rules, 7, Execution::Sequential).unwrap();
    let par = decide_batch(&rules, 7, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}

fn balanced_rule(d: usize) -> impl Strategy<Value = Rule> {
    any::<u64>()
        .prop_map(move |seed| random_balanced_rule(states(d), &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn any_rule(d: usize) -> impl Strategy<Value = Rule> {
    proptest::collection::vec(0..d as u8, d * d * d)
        .prop_map(move |table| Rule::new(states(d), table).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decide_matches_oracle_d3(r in balanced_rule(3), n in 3usize..=7) {
        prop_assert_eq!(decide(&r, n).unwrap().is_reversible(), oracle_is_reversible(&r, n).unwrap().bijective);
    }

    #[test]
    fn decide_matches_oracle_d4(r in balanced_rule(4), n in 3usize..=5) {
        prop_assert_eq!(decide(&r, n).unwrap().is_reversible(), oracle_is_reversible(&r, n).unwrap().bijective);
    }

    #[test]
    fn unbalanced_rules_are_irreversible(r in any_rule(3), n in 3usize..=20) {
        prop_assume!(!r.is_balanced());
        prop_assert!(!decide(&r, n).unwrap().is_reversible());
    }

    #[test]
    fn range_agrees_with_single(r in balanced_rule(3), lo in 3usize..8, len in 0usize..8) {
        let range = decide_range(&r, lo, lo + len).unwrap();
        prop_assert_eq!(range.len(), len + 1);
        for v in range {
            prop_assert_eq!(v.outcome, decide(&r, v.n).unwrap().outcome);
        }
    }
}
