use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use submax_bench::instance;
use submax_core::instance::{ConstraintKind, Family};
use submax_core::report::{solve, verify};
use submax_core::AlgoConfig;

fn pipelines(c: &mut Criterion) {
    let cfg = AlgoConfig::default();
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    for (name, constraint) in [
        ("matroid", ConstraintKind::Partition),
        ("knapsack", ConstraintKind::Knapsack),
    ] {
        for n in [6usize, 10] {
            let inst = instance(Family::Coverage, constraint, n);
            group.bench_with_input(BenchmarkId::new(name, n), &inst, |b, inst| {
                b.iter(|| solve(inst, &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn verification(c: &mut Criterion) {
    let cfg = AlgoConfig::default();
    let inst = instance(Family::Cut, ConstraintKind::Graphic, 10);
    let report = solve(&inst, &cfg).unwrap();
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    group.bench_function("cut-graphic-10", |b| b.iter(|| verify(&inst, &report).unwrap()));
    group.finish();
}

criterion_group!(benches, pipelines, verification);
criterion_main!(benches);
