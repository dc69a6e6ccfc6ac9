//! Sturm sequences: exact-as-practical counting and isolation of real roots.
//!
//! All work happens on a balanced copy `q(x) = p(rho x) / |p|` where `rho`
//! is the geometric-mean root magnitude, so thresholds are relative.

use super::gcd::{squarefree_part, GCD_RANK_TOL};
use super::polynomial::root_scale;
use super::Polynomial;
use crate::error::{Error, Result};

/// Sturm sequence of a square-free polynomial.
#[derive(Clone, Debug)]
pub(crate) struct SturmSequence {
    seq: Vec<Polynomial>,
}

impl SturmSequence {
    pub(crate) fn new(sf: &Polynomial) -> Self {
        let mut seq = vec![sf.normalized()];
        let d1 = sf.derivative(1);
        if !d1.is_zero() {
            seq.push(d1.normalized());
        }
        while seq.len() >= 2 {
            let a = &seq[seq.len() - 2];
            let b = &seq[seq.len() - 1];
            if b.deg() == 0 {
                break;
            }
            let (_, r) = a.div_rem(b);
            if r.norm_inf() <= GCD_RANK_TOL * a.norm_inf().max(b.norm_inf()) {
                break;
            }
            seq.push((-&r).normalized());
        }
        SturmSequence { seq }
    }

    pub(crate) fn first(&self) -> &Polynomial {
        &self.seq[0]
    }

    /// Sign variations at `x`; infinite `x` uses the leading-coefficient limits.
    pub(crate) fn variations(&self, x: f64) -> usize {
        let mut count = 0;
        let mut prev = 0.0f64;
        for p in &self.seq {
            let v = if x == f64::INFINITY {
                p.leading()
            } else if x == f64::NEG_INFINITY {
                if p.deg() % 2 == 0 {
                    p.leading()
                } else {
                    -p.leading()
                }
            } else {
                p.eval(x)
            };
            if v == 0.0 {
                continue;
            }
            if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
                count += 1;
            }
            prev = v;
        }
        count
    }

    /// Distinct roots in `(a, b]`.
    pub(crate) fn count(&self, a: f64, b: f64) -> usize {
        if a >= b {
            return 0;
        }
        self.variations(a).saturating_sub(self.variations(b))
    }

    /// Isolates and refines the distinct real roots in `(a, b]`.
    pub(crate) fn isolate(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        let f = self.first();
        let Some(d) = f.degree() else {
            return Ok(Vec::new());
        };
        if d == 0 {
            return Ok(Vec::new());
        }
        // Cauchy bound on root moduli.
        let lead = f.leading().abs();
        let bound = 1.0
            + f.coeffs()[1..]
                .iter()
                .fold(0.0f64, |m, c| m.max(c.abs() / lead));
        let lo = if a < -bound { -bound } else { a };
        let hi = if b > bound { bound } else { b };
        let mut roots = Vec::new();
        let mut stack = vec![(lo, hi, self.count(lo, hi))];
        while let Some((l, h, n)) = stack.pop() {
            match n {
                0 => {}
                1 => roots.push(self.refine(l, h)?),
                _ => {
                    let mid = 0.5 * (l + h);
                    if !(mid > l && mid < h) || h - l <= 4.0 * f64::EPSILON * (1.0 + mid.abs()) {
                        return Err(Error::ConvergenceFailure {
                            what: format!("{n} real roots could not be separated"),
                            lo: l,
                            hi: h,
                        });
                    }
                    let left = self.count(l, mid);
                    stack.push((l, mid, left));
                    stack.push((mid, h, n.saturating_sub(left)));
                }
            }
        }
        roots.sort_by(f64::total_cmp);
        Ok(roots)
    }

    /// Refines the single root in `(lo, hi]` to machine resolution.
    fn refine(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        let f = self.first();
        let fh = f.eval(hi);
        if fh == 0.0 {
            return Ok(hi);
        }
        let mut flo = f.eval(lo);
        let use_signs = flo != 0.0 && (flo > 0.0) != (fh > 0.0);
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                return Ok(if use_signs {
                    newton_polish(f, mid, lo, hi)
                } else {
                    mid
                });
            }
            if use_signs {
                let fm = f.eval(mid);
                if fm == 0.0 {
                    return Ok(mid);
                }
                if (fm > 0.0) == (flo > 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            } else if self.count(lo, mid) == 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::ConvergenceFailure {
            what: "root refinement stalled".into(),
            lo,
            hi,
        })
    }
}

/// One guarded Newton step inside the final bracket.
fn newton_polish(f: &Polynomial, x: f64, lo: f64, hi: f64) -> f64 {
    let df = f.derivative(1).eval(x);
    if df == 0.0 {
        return x;
    }
    let next = x - f.eval(x) / df;
    if next >= lo && next <= hi && f.eval(next).abs() <= f.eval(x).abs() {
        next
    } else {
        x
    }
}

/// Balanced copy of `p` and its scale factor `rho` (roots of the copy are
/// roots of `p` divided by `rho`).
pub(crate) fn balance(p: &Polynomial) -> (Polynomial, f64) {
    let rho = root_scale(p);
    (p.scale_variable(rho).normalized(), rho)
}

/// Number of distinct real roots of `p` in `(a, b]`. Either endpoint may be
/// infinite.
pub fn sturm_count(p: &Polynomial, a: f64, b: f64) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::DegenerateInput(
            "Sturm count of the zero polynomial".into(),
        ));
    }
    if p.deg() == 0 {
        return Ok(0);
    }
    let (q, rho) = balance(p);
    let seq = SturmSequence::new(&squarefree_part(&q));
    Ok(seq.count(a / rho, b / rho))
}

/// Distinct real roots of `p` in `(a, b]`, refined by bisection.
pub fn isolate_real_roots(p: &Polynomial, a: f64, b: f64) -> Result<Vec<f64>> {
    if p.is_zero() {
        return Err(Error::DegenerateInput(
            "root isolation of the zero polynomial".into(),
        ));
    }
    if p.deg() == 0 {
        return Ok(Vec::new());
    }
    let (q, rho) = balance(p);
    let seq = SturmSequence::new(&squarefree_part(&q));
    Ok(seq
        .isolate(a / rho, b / rho)?
        .into_iter()
        .map(|x| x * rho)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_examples() {
        let p = Polynomial::new(vec![1.0, -3.0, 2.0]);
        assert_eq!(sturm_count(&p, 0.0, f64::INFINITY).unwrap(), 2);
        let p = Polynomial::new(vec![1.0, 0.0, 1.0]);
        assert_eq!(
            sturm_count(&p, f64::NEG_INFINITY, f64::INFINITY).unwrap(),
            0
        );
        let p = Polynomial::new(vec![1.0, -2.0, 1.0]);
        assert_eq!(sturm_count(&p, 0.0, f64::INFINITY).unwrap(), 1);
    }

    #[test]
    fn half_open_interval_semantics() {
        // roots 1 and 2: (1, 2] contains only 2
        let p = Polynomial::new(vec![1.0, -3.0, 2.0]);
        assert_eq!(sturm_count(&p, 1.0, 2.0).unwrap(), 1);
        assert_eq!(sturm_count(&p, 0.0, 1.0).unwrap(), 1);
        assert_eq!(sturm_count(&p, 2.0, 5.0).unwrap(), 0);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(matches!(
            sturm_count(&Polynomial::zero(), 0.0, 1.0),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn isolation_refines_to_machine_precision() {
        let p = Polynomial::new(vec![1.0, 0.0, -2.0]);
        let r = isolate_real_roots(&p, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[1] - 2f64.sqrt()).abs() < 1e-15);
        assert!((r[0] + 2f64.sqrt()).abs() < 1e-15);
    }
}
