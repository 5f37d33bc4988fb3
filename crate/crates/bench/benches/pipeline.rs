use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use sdelab_core::{
    density, ldp, scale, sim, Initial, Interval, ModelSpec, NormalStream, SimConfig,
};

fn bench_rng(c: &mut Criterion) {
    c.bench_function("rng/normal_stream_1k", |b| {
        let stream = NormalStream::new(42, 7);
        b.iter(|| {
            let mut acc = 0.0;
            for n in 0..1_000u64 {
                acc += stream.normal(black_box(n));
            }
            acc
        })
    });
}

fn bench_scale(c: &mut Criterion) {
    let model = ModelSpec::saddle_node(1.0, 0.5, 0.75).unwrap();
    let interval = Interval::new(-1.0, 1.0);
    c.bench_function("scale/p_midpoint", |b| {
        b.iter(|| scale::scale_p(&model, interval, 0.0, black_box(0.3)).unwrap())
    });
    c.bench_function("scale/boundary_report", |b| {
        b.iter(|| scale::boundary_limits(&model, interval).unwrap())
    });
}

fn bench_density(c: &mut Criterion) {
    let model = ModelSpec::saddle_node(0.4, 0.8, 1.0).unwrap();
    let support = Interval::new(f64::NEG_INFINITY, -(0.4f64.sqrt()));
    c.bench_function("density/saddle_profile_50pts", |b| {
        b.iter(|| density::density_profile(&model, support, 50).unwrap())
    });
    c.bench_function("density/pitchfork_mode", |b| {
        b.iter(|| density::pitchfork_mode(black_box(1.0), 1.0, 2.0).unwrap())
    });
}

fn bench_ldp(c: &mut Criterion) {
    c.bench_function("ldp/quasipotential_quadrature", |b| {
        b.iter(|| ldp::quasipotential(1.0, 1.0, 2.0, black_box(0.75), 0.0).unwrap())
    });
}

fn bench_sim(c: &mut Criterion) {
    let model = ModelSpec::subcritical_pitchfork(-0.5, 0.5, 0.6).unwrap();
    c.bench_function("sim/path_1e4_steps", |b| {
        let cfg = SimConfig::new(0.01, 100.0, 1, 42);
        let mut i = 0u64;
        b.iter(|| {
            i += 1;
            sim::euler_maruyama_path(&model, 1.0, &cfg, black_box(i))
        })
    });
    let mut group = c.benchmark_group("sim/ensemble");
    group.sample_size(10);
    for &n in &[100usize, 1_000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut cfg = SimConfig::new(0.01, 5.0, n, 42);
            cfg.snapshot_times = vec![5.0];
            b.iter(|| sim::ensemble_run(&model, Initial::Point { x0: 1.0 }, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_rng, bench_scale, bench_density, bench_ldp, bench_sim);
criterion_main!(benches);
