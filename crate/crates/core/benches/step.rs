use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use avalanche::constitutive::PouliquenParams;
use avalanche::models::{ModelConfig, ViscosityPolicy};
use avalanche::solver::{self, Boundary, Grid1D, SimState, SolverConfig};
use avalanche::Execution;

fn setup(n: usize) -> (Grid1D, SimState, ModelConfig) {
    let grid = Grid1D::uniform(n, 0.0, 10.0).unwrap().with_bed(|x| 0.05 * (x * 3.0).sin()).unwrap();
    let h: Vec<f64> = grid.x.iter().map(|&x| 0.02 + 0.01 * (-(x - 3.0) * (x - 3.0)).exp()).collect();
    let hu = h.iter().map(|h| h * 0.2).collect();
    let p = PouliquenParams::new(21f64.to_radians(), 31f64.to_radians(), 0.136, 6.5e-4).unwrap();
    let cfg = ModelConfig::mu_i(26f64.to_radians(), p, 1.0, ViscosityPolicy::Formula);
    (grid, SimState::new(0.0, h, hu), cfg)
}

fn bench_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for n in [1 << 12, 1 << 16, 1 << 20] {
        let (grid, state, cfg) = setup(n);
        group.throughput(Throughput::Elements(n as u64));
        for (label, execution) in [("serial", Execution::Serial), ("parallel", Execution::Parallel)] {
            let scfg = SolverConfig { t_end: 1e9, bc: Boundary::Periodic, execution, ..SolverConfig::default() };
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, _| {
                b.iter(|| solver::step(black_box(&state), &grid, &cfg, &scfg).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_step
}
criterion_main!(benches);
