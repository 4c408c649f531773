use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperscatter::par::Execution;
use hyperscatter::radial::ModelPotential;
use hyperscatter::scattering::{scaling_sweep, KRange, SweepMode, SweepOptions};

fn sweep(c: &mut Criterion) {
    let p = ModelPotential::from_qr0(1.0, 0.01, 1.0).unwrap();
    let range = KRange { lo: 1e-3, hi: 1e-2, points: 8 };
    let mut group = c.benchmark_group("numeric_sweep_8pt");
    group.sample_size(10);
    let mut modes = vec![("sequential", Execution::Sequential)];
    if Execution::available() {
        modes.push(("parallel", Execution::Parallel));
    }
    for (name, exec) in modes {
        let opts = SweepOptions { exec, ..SweepOptions::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| scaling_sweep(1.0, &range, &p, SweepMode::Numeric, opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
