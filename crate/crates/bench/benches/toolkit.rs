use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use omrr_bench::{short_simulation, sweep_grid};
use omrr_core::fusion::synthesize_noise;
use omrr_core::{hybrid_sigma, run_cycles, sweep_bandwidth, HybridConfig};
use std::hint::black_box;

fn sensitivity(c: &mut Criterion) {
    let cfg = HybridConfig::default();
    c.bench_function("hybrid_sigma", |b| {
        b.iter(|| hybrid_sigma(black_box(&cfg)).unwrap())
    });
}

fn sweep(c: &mut Criterion) {
    let cfg = HybridConfig::default();
    let grid = sweep_grid(96);
    let mut group = c.benchmark_group("sweep_bandwidth");
    group.sample_size(10);
    group.bench_function("96_points", |b| {
        b.iter(|| sweep_bandwidth(black_box(&cfg), &grid).unwrap())
    });
    group.finish();
}

fn synthesis(c: &mut Criterion) {
    let ambient = HybridConfig::default().ambient;
    let mut group = c.benchmark_group("synthesize_noise");
    for n in [1 << 14, 12_288 * 8, 1 << 20] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| synthesize_noise(&ambient, 8192.0, n, 7).unwrap())
        });
    }
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_cycles");
    group.sample_size(10);
    for n in [16, 64] {
        let cfg = short_simulation(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| run_cycles(cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sensitivity, sweep, synthesis, simulation);
criterion_main!(benches);
