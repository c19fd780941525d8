use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use liquid_influence::fixtures;
use liquid_influence::graph::DelegationProfile;
use liquid_influence::influence::{expected_weights, SuspendibleProfile};
use liquid_influence::lottery::{enumerate_expected_weight, monte_carlo_expected_weight};
use liquid_influence::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn random_forest(n: usize, seed: u64) -> SuspendibleProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // each agent delegates to an earlier one, so paths stay short-ish
    let succ = (0..n).map(|i| if i == 0 || rng.gen_bool(0.05) { i } else { rng.gen_range(0..i) }).collect();
    SuspendibleProfile::uniform(DelegationProfile::from_indices(succ).unwrap(), 0.3).unwrap()
}

fn figure2() -> SuspendibleProfile {
    let profile = fixtures::builtin("figure2").unwrap().profile(None).unwrap();
    SuspendibleProfile::uniform(profile, 0.5).unwrap()
}

fn bench_expected_weights(c: &mut Criterion) {
    let mut group = c.benchmark_group("expected_weights");
    for n in [1_000, 20_000] {
        let sp = random_forest(n, 1);
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &sp, |b, sp| {
                b.iter(|| expected_weights(black_box(sp), mode))
            });
        }
    }
    group.finish();
}

fn bench_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_expected_weight");
    group.sample_size(10);
    let sp = SuspendibleProfile::uniform(fixtures::builtin("chain-16").unwrap().profile(None).unwrap(), 0.5).unwrap();
    for (name, mode) in MODES {
        group
            .bench_function(name, |b| b.iter(|| enumerate_expected_weight(black_box(&sp), &"t".into(), mode).unwrap()));
    }
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo_expected_weight");
    group.sample_size(10);
    let sp = figure2();
    for (name, mode) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| monte_carlo_expected_weight(black_box(&sp), &"n23".into(), 100_000, 42, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_expected_weights, bench_enumeration, bench_monte_carlo);
criterion_main!(benches);
