use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ildars::calibration::{calibrate, PairSelection};
use ildars::clustering::{cluster_by_gnomonic_bounded, cluster_by_inversion, DEFAULT_THRESHOLD};
use ildars::harness::{default_max_range, run_experiment, RunConfig};
use ildars_bench::noisy_measurements;

fn clustering(c: &mut Criterion) {
    let mut group = c.benchmark_group("clustering");
    for senders in [20, 80] {
        let ms = noisy_measurements(senders, 1);
        group.bench_with_input(BenchmarkId::new("inversion", senders), &ms, |b, ms| {
            b.iter(|| cluster_by_inversion(black_box(ms), DEFAULT_THRESHOLD))
        });
        group.bench_with_input(BenchmarkId::new("gnomonic", senders), &ms, |b, ms| {
            b.iter(|| cluster_by_gnomonic_bounded(black_box(ms), 7, Some(default_max_range(2.0))))
        });
    }
    group.finish();
}

fn calibration(c: &mut Criterion) {
    let ms = noisy_measurements(20, 2);
    let clusters = cluster_by_inversion(&ms, DEFAULT_THRESHOLD);
    for sel in PairSelection::ALL {
        c.bench_function(&format!("calibrate/{sel}"), |b| b.iter(|| calibrate(black_box(&ms), &clusters, sel)));
    }
}

fn experiment(c: &mut Criterion) {
    let cfg = RunConfig::default();
    c.bench_function("experiment/78-combos", |b| b.iter(|| run_experiment(black_box(&cfg), 3).unwrap()));
}

criterion_group!(benches, clustering, calibration, experiment);
criterion_main!(benches);
