use criterion::{criterion_group, criterion_main, Criterion};
use releq_bench::model_and_root;
use releq_core::branch::{continue_branch, seed_directions};
use releq_core::builtins::load_builtin;
use releq_core::dynamics::verify_relative_equilibrium;
use releq_core::linalg::Vector;
use releq_core::pipeline::{run_pipeline, PipelineOptions, Stage};
use releq_core::velocity::find_roots;

fn root_search(c: &mut Criterion) {
    let model = load_builtin("coupled_oscillators").unwrap();
    c.bench_function("coupled root search 61x61", |b| {
        b.iter(|| find_roots(&model, &[-3.0, -3.0], &[3.0, 3.0], 61).unwrap())
    });
}

fn continuation(c: &mut Criterion) {
    let (model, root) = model_and_root("spherical_pendulum", &[1.0]);
    let seeds = seed_directions(&model, &root, &[vec![1.0]]);
    let seed = seeds.seeds().next().unwrap().clone();
    c.bench_function("pendulum branch to r = 0.3", |b| {
        b.iter(|| continue_branch(&model, &root, &seed, 0.3, 0.01).unwrap())
    });
}

fn flow_check(c: &mut Criterion) {
    let model = load_builtin("motivating_s1").unwrap();
    let v = Vector::from_vec(vec![0.1, 0.0, 0.1, 0.0]);
    c.bench_function("flow check T = 1, dt = 1e-3", |b| {
        b.iter(|| verify_relative_equilibrium(&model, &v, &[2.0], 1.0, 1e-3, 1e-7).unwrap())
    });
}

fn analyze(c: &mut Criterion) {
    let model = load_builtin("motivating_s1").unwrap();
    let opts = PipelineOptions {
        stage: Stage::Branches,
        ..PipelineOptions::default()
    };
    let mut group = c.benchmark_group("analyze");
    group.sample_size(10);
    group.bench_function("motivating_s1", |b| b.iter(|| run_pipeline(&model, &opts)));
    group.finish();
}

criterion_group!(benches, root_search, continuation, flow_check, analyze);
criterion_main!(benches);
