//! Compares the data-parallel block solver and identity suite against a
//! single-threaded run. With the default `parallel` feature the sequential
//! baseline is a one-thread rayon pool; building with
//! `--no-default-features` removes rayon entirely and the two coincide.

use criterion::{criterion_group, criterion_main, Criterion};
use ncgcurv::algebra::Mode;
use ncgcurv::deformation::{verify_theta_theorems, ThetaContext};
use ncgcurv::geometries::builtin_sphere3;
use ncgcurv::levi_civita::solve_levi_civita;
use std::hint::black_box;

fn solve_deformed_sphere() {
    let geo = builtin_sphere3();
    let calc = geo.calculus(Mode::Deformed);
    let conn = solve_levi_civita(&calc).expect("solves");
    black_box(conn.a_form.num_terms());
}

fn theta_suite() {
    let geo = builtin_sphere3();
    let ctx = ThetaContext::new(&geo, 7, 12, None).expect("solves");
    let results = verify_theta_theorems(&ctx);
    black_box(results.len());
}

#[cfg(feature = "parallel")]
fn with_pool<F: FnOnce() + Send>(threads: usize, f: F) {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("pool")
        .install(f);
}

#[cfg(not(feature = "parallel"))]
fn with_pool<F: FnOnce()>(_threads: usize, f: F) {
    f();
}

fn bench_solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("deformed-sphere-solve");
    group.bench_function("parallel", |b| b.iter(|| with_pool(0, solve_deformed_sphere)));
    group.bench_function("sequential", |b| b.iter(|| with_pool(1, solve_deformed_sphere)));
    group.finish();
}

fn bench_theta_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("twist-identity-suite");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| with_pool(0, theta_suite)));
    group.bench_function("sequential", |b| b.iter(|| with_pool(1, theta_suite)));
    group.finish();
}

criterion_group!(benches, bench_solver, bench_theta_suite);
criterion_main!(benches);
