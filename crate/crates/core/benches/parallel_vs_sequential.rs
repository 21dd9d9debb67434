//! Each workload runs inside a one-thread rayon pool and inside the default
//! pool. Build with `--no-default-features` to time the plain-loop fallback.

use assouad_lab::constructions::{cantor_sample, progression, unit_grid};
use assouad_lab::dimension::{assouad_estimate_covering, assouad_estimate_subsets, DimensionParams};
use assouad_lab::{gh_bounds, FiniteMetricSpace};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::{ThreadPool, ThreadPoolBuilder};
use std::hint::black_box;

fn pools() -> Vec<(String, ThreadPool)> {
    let one = ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = ThreadPoolBuilder::new().build().unwrap();
    let n = all.current_num_threads();
    vec![("sequential".into(), one), (format!("parallel-{n}"), all)]
}

fn gh(c: &mut Criterion) {
    let x = cantor_sample(7).unwrap();
    let y = unit_grid(11).unwrap();
    let mut g = c.benchmark_group("gh_bounds_128x121");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(&name), |b| b.iter(|| pool.install(|| gh_bounds(black_box(&x), black_box(&y)))));
    }
    g.finish();
}

fn dimension(c: &mut Criterion) {
    let x = cantor_sample(8).unwrap();
    let p = DimensionParams::default();
    let mut g = c.benchmark_group("dimension_cantor8");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new("covering", &name), |b| {
            b.iter(|| pool.install(|| assouad_estimate_covering(black_box(&x), &p).unwrap()))
        });
        g.bench_function(BenchmarkId::new("subsets", &name), |b| {
            b.iter(|| pool.install(|| assouad_estimate_subsets(black_box(&x), &p).unwrap()))
        });
    }
    g.finish();
}

fn validation(c: &mut Criterion) {
    let x = progression(300).unwrap();
    let rows = x.to_rows();
    let mut g = c.benchmark_group("validate_300");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| pool.install(|| FiniteMetricSpace::validate(black_box(&rows), None, 1e-9).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, gh, dimension, validation);
criterion_main!(benches);
