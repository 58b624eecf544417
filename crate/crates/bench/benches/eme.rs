use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use submax_bench::{instance, vector};
use submax_core::eme::eval_f_uncounted;
use submax_core::instance::{ConstraintKind, Family};

fn eval(c: &mut Criterion) {
    let f = instance(Family::Coverage, ConstraintKind::Uniform, 10)
        .function()
        .unwrap();
    let mut group = c.benchmark_group("eval_f");
    for frac in [4usize, 8, 12, 16] {
        let y = vector(10, frac);
        assert_eq!(y.frac(), frac);
        group.bench_with_input(BenchmarkId::from_parameter(frac), &y, |b, y| {
            b.iter(|| eval_f_uncounted(&f, black_box(y), 24).unwrap())
        });
    }
    group.finish();
}

fn algebra(c: &mut Criterion) {
    let y = vector(10, 12);
    let z = vector(10, 6);
    c.bench_function("prob_sum", |b| b.iter(|| black_box(&y).prob_sum(black_box(&z))));
    c.bench_function("relax", |b| b.iter(|| black_box(&y).relax(3)));
    c.bench_function("marginal", |b| b.iter(|| black_box(&y).marginal(10)));
}

criterion_group!(benches, eval, algebra);
criterion_main!(benches);
