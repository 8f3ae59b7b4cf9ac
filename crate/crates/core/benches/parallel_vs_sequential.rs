use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hopf_collapse::collapse::{monte_carlo_correlation, ExperimentConfig};
use hopf_collapse::connection::{chern_number, holonomy_batch, LatitudeLoop, LineBundleModel};
use hopf_collapse::{Direction, Execution};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("correlation_mc");
    group.sample_size(10);
    let config = ExperimentConfig {
        axis_a: Direction::Z,
        axis_b: Direction::in_xz_plane(1.0),
        shots: 1_000_000,
        seed: 42,
    };
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::new(name, config.shots), &exec, |b, &exec| {
            b.iter(|| monte_carlo_correlation(black_box(&config), exec).unwrap())
        });
    }
    group.finish();
}

fn chern(c: &mut Criterion) {
    let mut group = c.benchmark_group("chern_lattice");
    let bundle = LineBundleModel::Tensor(vec![LineBundleModel::Power(2), LineBundleModel::Tautological]);
    for mesh in [32usize, 128] {
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, mesh), &mesh, |b, &mesh| {
                b.iter(|| chern_number(black_box(&bundle), mesh, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn holonomy(c: &mut Criterion) {
    let mut group = c.benchmark_group("holonomy_batch");
    group.sample_size(10);
    let loops: Vec<LatitudeLoop> = (1..=16)
        .map(|k| LatitudeLoop::new(Direction::Z, 0.18 * k as f64, 2000).unwrap())
        .collect();
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| holonomy_batch(black_box(&loops), exec)));
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, chern, holonomy);
criterion_main!(benches);
