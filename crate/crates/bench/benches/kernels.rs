use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use lmcf_bench::neck_grid;
use lmcf_core::flow::{csf_evolve, fixtures, CsfOptions};
use lmcf_core::lawlor::{lawlor_forward, lawlor_profile, special_residual};
use lmcf_core::poisson::{model_rhs, solve_equivariant_poisson, symmetric_neck};

fn lawlor(c: &mut Criterion) {
    let mut g = c.benchmark_group("lawlor");
    for n in [3usize, 5] {
        let a: Vec<f64> = (0..n).map(|k| 0.5 + k as f64).collect();
        g.bench_with_input(BenchmarkId::new("forward", n), &a, |b, a| b.iter(|| lawlor_forward(black_box(a)).unwrap()));
    }
    for points in [2001usize, 8001] {
        g.bench_with_input(BenchmarkId::new("profile", points), &points, |b, &m| {
            b.iter(|| lawlor_profile(&[1.0, 1.5, 0.6], &neck_grid(m)).unwrap())
        });
    }
    let p = lawlor_profile(&[1.0, 1.5, 0.6], &neck_grid(8001)).unwrap();
    g.bench_function("special_residual/8001", |b| b.iter(|| special_residual(black_box(&p))));
    g.finish();
}

fn flow(c: &mut Criterion) {
    let mut g = c.benchmark_group("csf");
    g.sample_size(20);
    let circle = fixtures::circle(1.0, 512).unwrap();
    g.bench_function("circle_512_x100", |b| b.iter(|| csf_evolve(&circle, &CsfOptions::new(1e-4, 100)).unwrap()));
    let pair = fixtures::hyperbola_pair(0.01, 10.0, 0.01).unwrap();
    g.bench_function("hyperbola_pair_x50", |b| b.iter(|| csf_evolve(&pair, &CsfOptions::new(1e-3, 50)).unwrap()));
    g.finish();
}

fn poisson(c: &mut Criterion) {
    let mut g = c.benchmark_group("poisson");
    for points in [1001usize, 4001] {
        let neck = symmetric_neck(3, 1.0, &neck_grid(points)).unwrap();
        let rhs = model_rhs(&neck, -0.5, 1.0).unwrap();
        g.bench_with_input(BenchmarkId::new("solve", points), &points, |b, _| {
            b.iter(|| solve_equivariant_poisson(&neck, &rhs, -0.5).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, lawlor, flow, poisson);
criterion_main!(benches);
