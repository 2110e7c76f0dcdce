use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fmzv_bench::{primes_from, random_elements};
use fmzv_core::dynamic::minimal_generating_system;
use fmzv_core::mitm::{nonzero_tuple, solve_bounded_relation, solve_bounded_relation_split};
use fmzv_core::pipeline::run_pipeline;
use fmzv_core::{CoefficientArray, PipelineConfig};

fn split(c: &mut Criterion) {
    // No relation expected at this size, so every tuple is visited.
    let (g, xs) = random_elements(1, 1_000_000_007, 6);
    let coeffs = CoefficientArray::new(3);
    let mut group = c.benchmark_group("bounded-relation-d6-b3");
    for left in [0usize, 3, 6] {
        group.bench_with_input(BenchmarkId::new("left", left), &left, |b, &left| {
            b.iter(|| {
                black_box(solve_bounded_relation_split(
                    &g,
                    &xs,
                    &coeffs,
                    left,
                    nonzero_tuple,
                ))
            })
        });
    }
    group.bench_function("default", |b| {
        b.iter(|| black_box(solve_bounded_relation(&g, &xs, &coeffs, nonzero_tuple)))
    });
    group.finish();
}

fn dynamic(c: &mut Criterion) {
    let (g, s) = random_elements(2, 104_729, 40);
    let coeffs = CoefficientArray::new(2);
    c.bench_function("generating-system-40", |b| {
        b.iter(|| black_box(minimal_generating_system(&g, &s, &coeffs)))
    });
}

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline-b30");
    group.sample_size(10);
    for w in [6u32, 7, 8] {
        let cfg = PipelineConfig::new(w, primes_from(101, 4), 30);
        group.bench_with_input(BenchmarkId::from_parameter(w), &cfg, |b, cfg| {
            b.iter(|| black_box(run_pipeline(cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, split, dynamic, pipeline);
criterion_main!(benches);
