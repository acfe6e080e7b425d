use std::time::Duration;

use auxcert::condition::{certify_batch, check_feasible_numeric_with};
use auxcert::plot::{sample, PlotTarget};
use auxcert::{AuxFunction, DualNum, Execution, StepFunction};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn random_steps(n: usize) -> Vec<StepFunction> {
    let mut rng = StdRng::seed_from_u64(1);
    (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=8);
            let mut cuts: Vec<i64> = (0..k - 1).map(|_| rng.gen_range(1..1_000_000)).collect();
            cuts.sort_unstable();
            cuts.dedup();
            let values = (0..=cuts.len())
                .map(|_| DualNum::from_integers(rng.gen_range(500_000..=1_000_000), 1_000_000))
                .collect();
            let bps = cuts
                .iter()
                .map(|&c| DualNum::from_integers(c, 1_000_000))
                .collect();
            StepFunction::new(bps, values).unwrap()
        })
        .collect()
}

fn numeric_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("numeric check, reference h");
    for grid in [1_001, 10_001] {
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, grid), &grid, |b, &grid| {
                b.iter(|| {
                    check_feasible_numeric_with(&AuxFunction::ReferenceTv, grid, 1e-9, exec)
                        .unwrap()
                })
            });
        }
    }
    g.finish();
}

fn exact_batch(c: &mut Criterion) {
    let hs = random_steps(256);
    let mut g = c.benchmark_group("exact certificates, 256 functions");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| certify_batch(black_box(&hs), exec)));
    }
    g.finish();
}

fn plot_samples(c: &mut Criterion) {
    let mut g = c.benchmark_group("plot G, reference h");
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| {
                sample(
                    &AuxFunction::ReferenceTv,
                    PlotTarget::Condition,
                    2_001,
                    exec,
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(
    name = benches;
    config = Criterion::default()
        .warm_up_time(Duration::from_millis(500))
        .measurement_time(Duration::from_secs(3))
        .sample_size(10);
    targets = numeric_grid, exact_batch, plot_samples
);
criterion_main!(benches);
