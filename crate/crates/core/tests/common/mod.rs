#![allow(dead_code)]

use monotrack_core::{Plant, Polynomial, RootSet};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn puma_plant() -> Plant {
    let num = Polynomial::new(vec![0.094, 20.0, 2.4e3, 3.5e5]);
    let den = Polynomial::new(vec![1.2e-3, 2.8, 2e3, 3.9e5, 8.7e7, 6.4e9, 6.4e11]);
    Plant::new(num, den).unwrap()
}

pub fn pair(re: f64, im: f64) -> RootSet {
    let mut z = RootSet::new();
    z.push_pair(re, im, 1);
    z
}

fn min_distance(z: Complex64, others: &[Complex64]) -> f64 {
    others
        .iter()
        .map(|o| (z - o).norm().min((z - o.conj()).norm()))
        .fold(f64::INFINITY, f64::min)
}

/// Zero set with open-LHP real zeros and complex pairs on both sides of the
/// imaginary axis (never real non-negative). Pairs in the right half-plane
/// keep `re / im <= max_ratio`.
pub fn zero_set<R: Rng>(rng: &mut R, m: usize, max_ratio: f64) -> RootSet {
    let mut z = RootSet::new();
    let mut placed: Vec<Complex64> = Vec::new();
    while z.count() < m {
        let room = m - z.count();
        let cand = if room >= 2 && rng.random_bool(0.6) {
            let im = rng.random_range(0.3..4.0);
            let re = if rng.random_bool(0.5) {
                rng.random_range(0.05..max_ratio) * im
            } else {
                -rng.random_range(0.1..4.0)
            };
            Complex64::new(re, im)
        } else {
            Complex64::new(-rng.random_range(0.2..6.0), 0.0)
        };
        if min_distance(cand, &placed) < 0.2 {
            continue;
        }
        placed.push(cand);
        if cand.im == 0.0 {
            z.push_real(cand.re, 1);
        } else {
            z.push_pair(cand.re, cand.im, 1);
        }
    }
    z
}

/// `n` poles (real or complex), at distance at least `sep` from each other
/// and from `avoid`, with real parts in `re_range`.
pub fn pole_set<R: Rng>(
    rng: &mut R,
    n: usize,
    re_range: (f64, f64),
    avoid: &RootSet,
    sep: f64,
) -> RootSet {
    let mut p = RootSet::new();
    let mut placed: Vec<Complex64> = avoid.expanded();
    while p.count() < n {
        let room = n - p.count();
        let re = rng.random_range(re_range.0..re_range.1);
        let cand = if room >= 2 && rng.random_bool(0.4) {
            Complex64::new(re, rng.random_range(0.3..4.0))
        } else {
            Complex64::new(re, 0.0)
        };
        if min_distance(cand, &placed) < sep {
            continue;
        }
        placed.push(cand);
        if cand.im == 0.0 {
            p.push_real(cand.re, 1);
        } else {
            p.push_pair(cand.re, cand.im, 1);
        }
    }
    p
}

/// Strictly proper plant with `m < n_o`, zeros from [`zero_set`], poles anywhere
/// in `re in [-5, 2]` away from the zeros.
pub fn random_plant<R: Rng>(rng: &mut R, max_no: usize, max_ratio: f64) -> Plant {
    let n_o = rng.random_range(1..=max_no);
    let m = rng.random_range(0..n_o);
    let zeros = zero_set(rng, m, max_ratio);
    let poles = pole_set(rng, n_o, (-5.0, 2.0), &zeros, 0.3);
    let gain = if rng.random_bool(0.5) { 1.0 } else { -1.0 } * rng.random_range(0.2..5.0);
    Plant::from_zpk(&zeros, &poles, gain).unwrap()
}
