use nalgebra::DMatrix;
use num_complex::Complex64;

use super::gcd::squarefree_decomposition;
use super::sturm::{balance, SturmSequence};
use super::{Polynomial, RootSet};
use crate::error::{Error, Result};

/// Relative imaginary-part threshold under which a companion eigenvalue is real.
pub const TAU_REAL: f64 = 1e-8;

/// Eigenvalues of the companion matrix of a monic-normalizable polynomial.
pub(crate) fn companion_eigenvalues(p: &Polynomial) -> Vec<Complex64> {
    let d = p.deg();
    if d == 0 {
        return Vec::new();
    }
    let m = p.monic();
    let c = m.coeffs();
    if d == 1 {
        return vec![Complex64::new(-c[1], 0.0)];
    }
    let mut comp = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        comp[(0, j)] = -c[j + 1];
    }
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    comp.complex_eigenvalues().iter().copied().collect()
}

/// Full root multiset of `p`.
///
/// Distinct real roots come from Sturm isolation of each square-free factor,
/// multiplicities from the repeated-gcd decomposition, and the remaining
/// roots from companion-matrix eigenvalues.
pub fn real_roots(p: &Polynomial) -> Result<RootSet> {
    if p.is_zero() {
        return Err(Error::DegenerateInput(
            "roots of the zero polynomial".into(),
        ));
    }
    let mut set = RootSet::new();
    let coeffs = p.coeffs();
    let zeros_at_origin = coeffs.iter().rev().take_while(|&&c| c == 0.0).count();
    set.push_real(0.0, zeros_at_origin);
    let reduced = Polynomial::new(coeffs[..coeffs.len() - zeros_at_origin].to_vec());
    if reduced.deg() == 0 {
        return Ok(set);
    }
    let (q, rho) = balance(&reduced);
    for (factor, mult) in squarefree_decomposition(&q) {
        let seq = SturmSequence::new(&factor);
        let reals = seq.isolate(f64::NEG_INFINITY, f64::INFINITY)?;
        let mut eig = companion_eigenvalues(&factor);
        for &r in reals.iter().filter(|&&r| crosses(&factor, r)) {
            set.push_real(r * rho, mult);
            if let Some(idx) = nearest(&eig, Complex64::new(r, 0.0)) {
                eig.swap_remove(idx);
            }
        }
        let (near_real, mut rest): (Vec<_>, Vec<_>) = eig
            .into_iter()
            .partition(|z| z.im.abs() <= TAU_REAL * (1.0 + z.re.abs()));
        for z in near_real {
            set.push_real(polish(&factor, z.re) * rho, mult);
        }
        rest.sort_by(|a, b| b.im.total_cmp(&a.im));
        let pairs = rest.len() / 2;
        for z in &rest[..pairs] {
            set.push_pair(z.re * rho, z.im.abs() * rho, mult);
        }
        if rest.len() % 2 == 1 {
            let z = rest[pairs];
            set.push_real(polish(&factor, z.re) * rho, mult);
        }
    }
    set.sort();
    Ok(set)
}

/// Sign change of `f` across a narrow bracket around `r`. Sturm counts on
/// tightly clustered factors can report roots that fail this.
fn crosses(f: &Polynomial, r: f64) -> bool {
    let h = 1e-8 * (1.0 + r.abs());
    let (a, b) = (f.eval(r - h), f.eval(r + h));
    a == 0.0 || b == 0.0 || (a > 0.0) != (b > 0.0)
}

fn nearest(values: &[Complex64], target: Complex64) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
        .map(|(i, _)| i)
}

fn polish(f: &Polynomial, mut x: f64) -> f64 {
    let df = f.derivative(1);
    for _ in 0..4 {
        let d = df.eval(x);
        if d == 0.0 {
            break;
        }
        let next = x - f.eval(x) / d;
        if !next.is_finite() || f.eval(next).abs() > f.eval(x).abs() {
            break;
        }
        x = next;
    }
    x
}

/// Decides `p(t) >= 0` for every `t > 0`.
///
/// The leading coefficient must be positive and no odd-multiplicity factor
/// may have a root in `(0, inf)`; even-multiplicity touches are allowed.
pub fn nonneg_on_halfline(p: &Polynomial) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::DegenerateInput(
            "non-negativity of the zero polynomial".into(),
        ));
    }
    if p.leading() < 0.0 {
        return Ok(false);
    }
    if p.deg() == 0 {
        return Ok(true);
    }
    let (q, _) = balance(p);
    for (factor, mult) in squarefree_decomposition(&q) {
        if mult % 2 == 1 && SturmSequence::new(&factor).count(0.0, f64::INFINITY) > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}
