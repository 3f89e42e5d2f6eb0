//! Sequential vs rayon execution of the two data-parallel scans.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use shimura_core::criterion::{default_max_product, exceptional_sweep, verdicts_x0};
use shimura_core::localpoints::density_scan;
use shimura_core::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("x0_sweep");
    group.sample_size(10);
    let bound = default_max_product();
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("certified", name), &bound, |b, &m| {
            b.iter(|| exceptional_sweep(black_box(m), exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("verdicts_1e5", name), &100_000u64, |b, &m| {
            b.iter(|| verdicts_x0(black_box(m), exec).unwrap())
        });
    }
    group.finish();
}

fn density(c: &mut Criterion) {
    let mut group = c.benchmark_group("x14_density");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("bound_1e5", name), &100_000u64, |b, &bound| {
            b.iter(|| density_scan(black_box(bound), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, density);
criterion_main!(benches);
