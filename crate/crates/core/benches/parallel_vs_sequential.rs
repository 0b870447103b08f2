use std::hint::black_box;

use carev::oracle::{oracle_with, OracleOptions};
use carev::strategies::random_balanced_rule;
use carev::{
    conjecture_experiment, decide, decide_batch, decide_range_with, DecideOptions, Execution, Rule,
    States,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn states(d: usize) -> States {
    States::new(d).unwrap()
}

fn rev_rule() -> Rule {
    Rule::parse("201210210201210210201210210", states(3)).unwrap()
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    let r = rev_rule();
    for n in [10, 12] {
        for (name, exec) in MODES {
            let options = OracleOptions {
                exec,
                ..Default::default()
            };
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| oracle_with(black_box(&r), n, options).unwrap())
            });
        }
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide_batch");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rules: Vec<Rule> = (0..2000)
        .map(|_| random_balanced_rule(states(3), &mut rng))
        .collect();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| decide_batch(black_box(&rules), 50, exec).unwrap())
        });
    }
    group.finish();
}

fn range(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide_range");
    let r = Rule::parse("102221010102221010102221010", states(3)).unwrap();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                decide_range_with(black_box(&r), 3, 2000, DecideOptions::default(), exec).unwrap()
            })
        });
    }
    group.finish();
}

fn conjecture(c: &mut Criterion) {
    let mut group = c.benchmark_group("conjecture_eca");
    group.sample_size(10);
    let ecas: Vec<Rule> = (0u32..256)
        .map(|code| {
            Rule::new(states(2), (0..8).map(|r| ((code >> r) & 1) as u8).collect()).unwrap()
        })
        .collect();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| conjecture_experiment(ecas.iter().cloned(), 3, 10, exec).unwrap())
        });
    }
    group.finish();
}

fn single(c: &mut Criterion) {
    let r = Rule::parse("000111222000111222000111222", states(3)).unwrap();
    c.bench_function("decide_n_1e6", |b| {
        b.iter(|| decide(black_box(&r), 1_000_000).unwrap())
    });
}

criterion_group!(benches, oracle, batch, range, conjecture, single);
criterion_main!(benches);
