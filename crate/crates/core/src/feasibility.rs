//! Feasibility tests for monotone tracking.
//!
//! The transformed numerator `B~(s) = sum b_i s^(n-i) / (i-1)!` decides
//! whether any set of `n` stable closed-loop poles makes `K B(s) / A(s)` a
//! positive-impulse-response (PIR) system: it must have no real root in
//! `[0, inf)`. Shifting the zeros by `alpha` gives the same test for decay
//! rates faster than `-alpha`. For a repeated pole `sigma`, the degree-`m`
//! polynomial `Q(sigma, t)` certifies PIR exactly when it is non-negative
//! for `t > 0`.

use crate::error::{Error, Result};
use crate::polycore::{
    from_roots, isolate_real_roots, nonneg_on_halfline, root_scale, Polynomial, RootSet,
};

/// A root `x` of the transformed numerator with `x >= -TAU_ROOT * scale`
/// counts as non-negative.
pub const TAU_ROOT: f64 = 1e-9;

/// Closed-loop orders beyond this overflow the factorial weights.
pub const MAX_ORDER: usize = 170;

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub btilde: Polynomial,
    /// Non-negative real roots of `btilde`; empty exactly when feasible.
    pub offending_roots: Vec<f64>,
    pub n: usize,
    pub alpha: f64,
}

fn check_order(m: usize, n: usize) -> Result<()> {
    if n <= m {
        return Err(Error::DegenerateInput(format!(
            "closed loop must be strictly proper: n = {n} <= m = {m}"
        )));
    }
    if n > MAX_ORDER {
        return Err(Error::DegenerateInput(format!(
            "order n = {n} exceeds {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// `1 / k!` for `k = 0..len`.
fn inverse_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut v = 1.0;
    for k in 0..len {
        if k > 0 {
            v /= k as f64;
        }
        out.push(v);
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The transformed numerator for `n` closed-loop poles.
///
/// With `b_i` the coefficient of `s^(n-i)` in `b`, returns
/// `sum_{i=1..n} b_i / (i-1)! * s^(n-i)`, a polynomial of the same degree as `b`.
pub fn btilde(b: &Polynomial, n: usize) -> Result<Polynomial> {
    let Some(m) = b.degree() else {
        return Err(Error::DegenerateInput("zero numerator".into()));
    };
    check_order(m, n)?;
    let inv = inverse_factorials(n);
    // b.coeffs()[k] multiplies s^(m-k) = s^(n-i) with i = n-m+k
    let coeffs: Vec<f64> = b
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &c)| c * inv[n - m + k - 1])
        .collect();
    Ok(Polynomial::new(coeffs))
}

/// Verdict for `K * prod (s - z_i)` with `n` equal-pole-capable closed-loop poles.
pub fn feasible_theorem1(zeros: &RootSet, k: f64, n: usize) -> Result<FeasibilityReport> {
    feasible_with_decay(zeros, k, n, 0.0)
}

/// Verdict for a closed-loop decay rate strictly faster than `-alpha`:
/// the zeros are shifted by `+alpha` before applying the plain test.
pub fn feasible_with_decay(
    zeros: &RootSet,
    k: f64,
    n: usize,
    alpha: f64,
) -> Result<FeasibilityReport> {
    if k.is_nan() || k <= 0.0 || k.is_infinite() {
        return Err(Error::DegenerateInput(format!(
            "closed-loop gain must be positive, got {k}"
        )));
    }
    if alpha.is_nan() || alpha < 0.0 || alpha.is_infinite() {
        return Err(Error::DegenerateInput(format!(
            "alpha must be finite and >= 0, got {alpha}"
        )));
    }
    check_order(zeros.count(), n)?;
    let shifted = from_roots(&zeros.shifted(alpha), k);
    let bt = btilde(&shifted, n)?;
    let offending_roots = nonnegative_roots(&bt)?;
    Ok(FeasibilityReport {
        feasible: offending_roots.is_empty(),
        btilde: bt,
        offending_roots,
        n,
        alpha,
    })
}

/// Real roots of `p` in `[-TAU_ROOT * scale, inf)`.
fn nonnegative_roots(p: &Polynomial) -> Result<Vec<f64>> {
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let scale = 1.0 + root_scale(p);
    isolate_real_roots(p, -TAU_ROOT * scale, f64::INFINITY)
}

/// `Q(sigma, t) = sum_{j=0..m} C(n-1, j) B^(j)(sigma) t^(m-j)` as a polynomial in `t`.
pub fn build_q(b: &Polynomial, sigma: f64, n: usize) -> Result<Polynomial> {
    let Some(m) = b.degree() else {
        return Err(Error::DegenerateInput("zero numerator".into()));
    };
    check_order(m, n)?;
    let coeffs: Vec<f64> = (0..=m)
        .map(|j| binomial(n - 1, j) * b.derivative(j).eval(sigma))
        .collect();
    Ok(Polynomial::new(coeffs))
}

/// Coefficient functions `q_i(t)`, `i = n-m ..= n`, with
/// `Q(sigma, t) = sum_i q_i(t) sigma^(n-i)`. Returned in order of increasing `i`.
pub fn q_coefficients(b: &Polynomial, n: usize) -> Result<Vec<Polynomial>> {
    let Some(m) = b.degree() else {
        return Err(Error::DegenerateInput("zero numerator".into()));
    };
    check_order(m, n)?;
    // b_i multiplies s^(n-i); zero for i < n-m
    let bi = |i: usize| if i + m >= n { b.coeff(n - i) } else { 0.0 };
    let fact = |j: usize| (1..=j).fold(1.0, |a, x| a * x as f64);
    Ok((n - m..=n)
        .map(|i| {
            let mut asc = vec![0.0; m + 1];
            for j in 0..=(i + m - n) {
                asc[m - j] += binomial(n - i + j, j) * binomial(n - 1, j) * fact(j) * bi(i - j);
            }
            Polynomial::from_ascending(&asc)
        })
        .collect())
}

/// PIR test for `K b(s) / (s - sigma)^n`: true iff `K > 0` and `Q(sigma, t) >= 0` on `t > 0`.
pub fn pir_equal_poles(b: &Polynomial, k: f64, sigma: f64, n: usize) -> Result<bool> {
    let q = build_q(b, sigma, n)?;
    if k.is_nan() || k <= 0.0 {
        return Ok(false);
    }
    nonneg_on_halfline(&q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(re: f64, im: f64) -> RootSet {
        let mut z = RootSet::new();
        z.push_pair(re, im, 1);
        z
    }

    fn close(a: &Polynomial, b: &[f64], tol: f64) -> bool {
        a.coeffs().len() == b.len() && a.coeffs().iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn btilde_examples() {
        assert!(close(
            &btilde(&Polynomial::constant(2.0), 3).unwrap(),
            &[1.0],
            1e-15
        ));
        assert!(close(
            &btilde(&Polynomial::new(vec![1.0, 2.0]), 3).unwrap(),
            &[1.0, 1.0],
            1e-15
        ));
        let bt = btilde(&Polynomial::new(vec![1.0, -2.0, 2.0]), 4).unwrap();
        assert!(close(&bt, &[1.0, -1.0, 1.0 / 3.0], 1e-15));
        assert!(btilde(&Polynomial::new(vec![1.0, 2.0]), 1).is_err());
    }

    #[test]
    fn theorem1_examples() {
        for n in 1..8 {
            assert!(feasible_theorem1(&RootSet::new(), 1.0, n).unwrap().feasible);
        }
        assert!(feasible_theorem1(&pair(1.0, 1.0), 1.0, 4).unwrap().feasible);
        let r = feasible_theorem1(&pair(1.0, 1.0), 1.0, 3).unwrap();
        assert!(!r.feasible);
        assert!(!r.offending_roots.is_empty());
    }

    #[test]
    fn nonnegative_zero_is_infeasible() {
        let r = feasible_theorem1(&RootSet::from_real(&[1.0]), 1.0, 4).unwrap();
        assert!(!r.feasible);
        // zero exactly at the origin: b_n = 0 puts a root of B~ at 0
        let r = feasible_theorem1(&RootSet::from_real(&[0.0, -1.0]), 1.0, 5).unwrap();
        assert_eq!(r.offending_roots, vec![0.0]);
    }

    #[test]
    fn decay_examples() {
        let z = pair(-16.0, 141.0);
        assert!(feasible_with_decay(&z, 1.0, 11, 400.0).unwrap().feasible);
        assert!(!feasible_with_decay(&z, 1.0, 11, 440.0).unwrap().feasible);
        let zz = pair(1.0, 1.0);
        for n in 3..6 {
            assert_eq!(
                feasible_with_decay(&zz, 1.0, n, 0.0).unwrap(),
                feasible_theorem1(&zz, 1.0, n).unwrap()
            );
        }
    }

    #[test]
    fn precondition_errors() {
        assert!(feasible_theorem1(&RootSet::new(), 0.0, 2).is_err());
        assert!(feasible_theorem1(&RootSet::new(), -1.0, 2).is_err());
        assert!(feasible_theorem1(&RootSet::from_real(&[-1.0, -2.0]), 1.0, 2).is_err());
        assert!(feasible_with_decay(&RootSet::new(), 1.0, 2, -1.0).is_err());
        assert!(build_q(&Polynomial::zero(), -1.0, 3).is_err());
    }

    #[test]
    fn q_examples() {
        assert!(close(
            &build_q(&Polynomial::constant(3.0), -2.0, 5).unwrap(),
            &[3.0],
            0.0
        ));
        assert!(close(
            &build_q(&Polynomial::new(vec![1.0, 2.0]), 0.0, 3).unwrap(),
            &[2.0, 2.0],
            0.0
        ));
        let q = q_coefficients(&Polynomial::constant(3.0), 4).unwrap();
        assert_eq!(q.len(), 1);
        assert!(close(&q[0], &[3.0], 0.0));
    }

    #[test]
    fn q_at_zero_matches_btilde() {
        // Q(0, t) = (n-1)! t^m B~(1/t)
        let b = Polynomial::new(vec![0.7, -1.3, 2.1, 0.4]);
        let n = 6;
        let q = build_q(&b, 0.0, n).unwrap();
        let bt = btilde(&b, n).unwrap();
        for &t in &[0.1f64, 0.5, 1.0, 3.0] {
            let via_bt = 120.0 * t.powi(3) * bt.eval(1.0 / t);
            assert!((q.eval(t) - via_bt).abs() <= 1e-12 * (1.0 + via_bt.abs()));
        }
    }

    #[test]
    fn pir_examples() {
        assert!(pir_equal_poles(&Polynomial::one(), 1.0, -1.0, 4).unwrap());
        let b = Polynomial::new(vec![1.0, 4.0, 4.0]);
        assert!(pir_equal_poles(&b, 1.0, -1.0, 3).unwrap());
        assert!(!pir_equal_poles(&b, 1.0, -3.0, 3).unwrap());
        assert!(!pir_equal_poles(&Polynomial::one(), -1.0, -1.0, 4).unwrap());
    }
}
