use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fastrate_bench::{linear_dataset, linear_instances, sphere_points};
use fastrate_core::{
    lambda_for, mirror_descent_stepsize, run_mirror_descent, solve_regularized_erm, FunctionClass, HardDistribution,
    InstanceStream, LossSpec, MirrorSetup,
};

fn mirror_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("mirror_step");
    for d in [16, 256, 4096] {
        let g = sphere_points(1, d, 1).remove(0);
        let ball = MirrorSetup::euclidean(d, 1.0).unwrap();
        let simplex = MirrorSetup::entropy(d, 2.0).unwrap();
        let (wb, ws) = (ball.default_start(), simplex.default_start());
        group.bench_with_input(BenchmarkId::new("euclidean", d), &d, |b, _| {
            b.iter(|| ball.mirror_step(&wb, &g, 0.1).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("entropy", d), &d, |b, _| {
            b.iter(|| simplex.mirror_step(&ws, &g, 0.1).unwrap())
        });
    }
    group.finish();
}

fn online_run(c: &mut Criterion) {
    let loss = LossSpec::squared();
    let setup = MirrorSetup::euclidean(10, 1.0).unwrap();
    let instances = linear_instances(1000, 10, 0.1, 2);
    let eta = mirror_descent_stepsize(1.0, 1.0, instances.len(), 0.01).unwrap();
    let w1 = setup.default_start();
    c.bench_function("mirror_descent_1000_rounds", |b| {
        b.iter(|| run_mirror_descent(&setup, &loss, InstanceStream::fixed(instances.clone()), eta, &w1).unwrap())
    });
}

fn regularized_solver(c: &mut Criterion) {
    let loss = LossSpec::squared();
    let mut group = c.benchmark_group("regularized_erm");
    group.sample_size(20);
    for n in [100, 1000] {
        let data = linear_dataset(n, 20, 0.1, 3);
        let setup = MirrorSetup::euclidean(20, 1.0).unwrap();
        let lambda = lambda_for(1.0, 1.0, n, 0.01).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| solve_regularized_erm(&setup, &loss, &data, lambda, 1e-10).unwrap())
        });
    }
    group.finish();
}

fn rademacher(c: &mut Criterion) {
    let mut group = c.benchmark_group("rademacher_exact");
    let class = FunctionClass::l2_ball(1.0, 3).unwrap();
    for n in [8, 12, 16] {
        let xs = sphere_points(n, 3, 4);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| class.rademacher_exact(&xs).unwrap())
        });
    }
    group.finish();
}

fn construction_erm(c: &mut Criterion) {
    let n = 4096;
    let dist = HardDistribution::from_name("hardB:0.1", n, 5).unwrap();
    let pairs = dist.sample_coordinates(n, 6).unwrap();
    c.bench_function("hardB_erm_4096", |b| b.iter(|| dist.erm_from_coordinates(&pairs).unwrap()));
}

criterion_group!(benches, mirror_step, online_run, regularized_solver, rademacher, construction_erm);
criterion_main!(benches);
