use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use srg_cert::ratfun::FrequencyGrid;
use srg_cert::separation::{sweep_feedback, Method, SweepConfig};
use srg_cert::srg::SamplerConfig;
use srg_cert_bench::bundled_pair;

fn full_sweep(c: &mut Criterion) {
    let (h1, h2) = bundled_pair();
    for method in Method::ALL {
        let cfg = SweepConfig {
            method,
            sampler: SamplerConfig::with_n_dir(400),
            n_phase_bins: 180,
            refine_minima: 0,
            include_zero: false,
            include_infinity: false,
            ..SweepConfig::default()
        };
        let mut group = c.benchmark_group(format!("sweep/{method}"));
        group.sample_size(10);
        for n_omega in [50, 100, 200, 400] {
            let grid = FrequencyGrid::log_count(1e-3, 1e3, n_omega).expect("grid");
            group.bench_with_input(BenchmarkId::from_parameter(n_omega), &grid, |b, grid| {
                b.iter(|| std::hint::black_box(sweep_feedback(&h1, &h2, grid, &cfg).expect("sweep")))
            });
        }
        group.finish();
    }
}

criterion_group!(benches, full_sweep);
criterion_main!(benches);
