use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use switchkit::bounds::convergence::threshold_sweep;
use switchkit::bounds::kl::KLExp;
use switchkit::cases::lorenz::{run_lorenz_table, LorenzSetup};
use switchkit::experiments::dwell_gap_batch;
use switchkit::par::Execution;
use switchkit::sim::IntegratorConfig;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn lorenz_table(c: &mut Criterion) {
    let setup = LorenzSetup {
        horizon: 3.0,
        ..LorenzSetup::default()
    };
    let cfg = IntegratorConfig::until(setup.horizon).unwrap();
    let mut g = c.benchmark_group("lorenz_table");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_lorenz_table(black_box(&setup), true, &cfg, exec).unwrap())
        });
    }
    g.finish();
}

fn dwell_batch(c: &mut Criterion) {
    let mut g = c.benchmark_group("dwell_gap_batch");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| dwell_gap_batch(black_box(3), 16, 1e-3, 1e-6, exec).unwrap())
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let beta1 = KLExp::new(2.0, 3.0).unwrap();
    let beta0 = KLExp::new(1.5, 0.5).unwrap();
    let mut g = c.benchmark_group("threshold_sweep");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| threshold_sweep(&beta1, &beta0, black_box(10.0), 0.01, 1e-4, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, lorenz_table, dwell_batch, sweep);
criterion_main!(benches);
