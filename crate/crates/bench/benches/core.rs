use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use monotrack_bench::{puma, puma_zeros};
use monotrack_core::{
    char_poly, close_loop, feasible_theorem1, min_order, poly_gcd, real_roots, sigma_star,
    simulate_step, synthesize, Polynomial, RootSet, SimOptions,
};

fn feasibility(c: &mut Criterion) {
    let z = puma_zeros();
    let mut g = c.benchmark_group("feasible_theorem1");
    for n in [11usize, 20, 40] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| feasible_theorem1(black_box(&z), 1.0, n).unwrap())
        });
    }
    g.finish();
}

fn limits(c: &mut Criterion) {
    let z = puma_zeros();
    c.bench_function("sigma_star_puma_n11", |b| {
        b.iter(|| sigma_star(black_box(&z), 1.0, 11).unwrap())
    });
    let mut pair = RootSet::new();
    pair.push_pair(2.0, 1.0, 1);
    c.bench_function("min_order_2pm1i", |b| {
        b.iter(|| min_order(black_box(&pair), 1.0, Some(3)).unwrap())
    });
}

fn roots(c: &mut Criterion) {
    let p = puma();
    c.bench_function("real_roots_puma_den", |b| {
        b.iter(|| real_roots(black_box(p.den())).unwrap())
    });
    let clustered = char_poly(&RootSet::repeated(-2.0, 8));
    c.bench_function("real_roots_8fold", |b| {
        b.iter(|| real_roots(black_box(&clustered)).unwrap())
    });
    let a = &clustered * &Polynomial::new(vec![1.0, 3.0]);
    let d = &clustered * &Polynomial::new(vec![1.0, -1.0, 5.0]);
    c.bench_function("poly_gcd_deg8_common", |b| {
        b.iter(|| poly_gcd(black_box(&a), black_box(&d)))
    });
}

fn synthesis(c: &mut Criterion) {
    let p = puma();
    c.bench_function("synthesize_puma_nc5", |b| {
        b.iter(|| synthesize(black_box(&p), 5, Some(150.0)).unwrap())
    });
    let rep = synthesize(&p, 5, Some(150.0)).unwrap();
    let cl = close_loop(&p, &rep.controller).unwrap();
    c.bench_function("simulate_step_puma", |b| {
        b.iter(|| simulate_step(black_box(&cl), &SimOptions::default()).unwrap())
    });
}

criterion_group!(benches, feasibility, limits, roots, synthesis);
criterion_main!(benches);
