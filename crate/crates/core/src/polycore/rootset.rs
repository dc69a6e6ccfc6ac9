use num_complex::Complex64;

use super::Polynomial;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// A complex-conjugate pair `re ± i·im` with `im > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPair {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

/// Root multiset of a real polynomial.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RootSet {
    pub real: Vec<RealRoot>,
    pub complex: Vec<ComplexPair>,
}

impl RootSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// All roots simple and real.
    pub fn from_real(values: &[f64]) -> Self {
        let mut set = RootSet::new();
        for &v in values {
            set.push_real(v, 1);
        }
        set
    }

    /// A single root of multiplicity `n`.
    pub fn repeated(value: f64, n: usize) -> Self {
        let mut set = RootSet::new();
        set.push_real(value, n);
        set
    }

    pub fn push_real(&mut self, value: f64, multiplicity: usize) -> &mut Self {
        if multiplicity > 0 {
            self.real.push(RealRoot {
                value,
                multiplicity,
            });
        }
        self
    }

    /// Adds the pair `re ± i·im`; the sign of `im` is ignored. A zero
    /// imaginary part records a real root of twice the multiplicity.
    pub fn push_pair(&mut self, re: f64, im: f64, multiplicity: usize) -> &mut Self {
        if multiplicity == 0 {
            return self;
        }
        if im == 0.0 {
            return self.push_real(re, 2 * multiplicity);
        }
        self.complex.push(ComplexPair {
            re,
            im: im.abs(),
            multiplicity,
        });
        self
    }

    /// Total multiplicity (degree of the polynomial with these roots).
    pub fn count(&self) -> usize {
        self.real.iter().map(|r| r.multiplicity).sum::<usize>()
            + 2 * self.complex.iter().map(|c| c.multiplicity).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    /// Every root listed with repetition, conjugates included.
    pub fn expanded(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.count());
        for r in &self.real {
            out.extend(std::iter::repeat_n(
                Complex64::new(r.value, 0.0),
                r.multiplicity,
            ));
        }
        for c in &self.complex {
            for _ in 0..c.multiplicity {
                out.push(Complex64::new(c.re, c.im));
                out.push(Complex64::new(c.re, -c.im));
            }
        }
        out
    }

    /// Largest real part, `-inf` for an empty set.
    pub fn abscissa(&self) -> f64 {
        self.real
            .iter()
            .map(|r| r.value)
            .chain(self.complex.iter().map(|c| c.re))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest real root, `-inf` when there is none.
    pub fn max_real(&self) -> f64 {
        self.real
            .iter()
            .map(|r| r.value)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_modulus(&self) -> f64 {
        self.expanded().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Every root shifted by `delta` along the real axis.
    pub fn shifted(&self, delta: f64) -> RootSet {
        RootSet {
            real: self
                .real
                .iter()
                .map(|r| RealRoot {
                    value: r.value + delta,
                    ..*r
                })
                .collect(),
            complex: self
                .complex
                .iter()
                .map(|c| ComplexPair {
                    re: c.re + delta,
                    ..*c
                })
                .collect(),
        }
    }

    /// Canonical ordering: real roots ascending, pairs by (re, im).
    pub fn sort(&mut self) {
        self.real.sort_by(|a, b| a.value.total_cmp(&b.value));
        self.complex
            .sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    }

    /// True when both sets hold the same roots (with multiplicity) up to
    /// `tol * (1 + |root|)`, matched greedily by distance.
    pub fn approx_eq(&self, other: &RootSet, tol: f64) -> bool {
        let a = self.expanded();
        let mut b = other.expanded();
        if a.len() != b.len() {
            return false;
        }
        for z in a {
            let Some((idx, dist)) = b
                .iter()
                .enumerate()
                .map(|(i, w)| (i, (z - w).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
            else {
                return false;
            };
            if dist > tol * (1.0 + z.norm()) {
                return false;
            }
            b.swap_remove(idx);
        }
        true
    }
}

/// Expands `leading * prod (s - r)` into coefficients. Conjugate pairs become
/// real quadratics `s^2 - 2 re s + re^2 + im^2`.
pub fn from_roots(roots: &RootSet, leading: f64) -> Polynomial {
    let mut p = Polynomial::constant(leading);
    for r in &roots.real {
        let factor = Polynomial::linear(r.value);
        for _ in 0..r.multiplicity {
            p = &p * &factor;
        }
    }
    for c in &roots.complex {
        let factor = Polynomial::new(vec![1.0, -2.0 * c.re, c.re * c.re + c.im * c.im]);
        for _ in 0..c.multiplicity {
            p = &p * &factor;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_roots_examples() {
        let p = from_roots(&RootSet::from_real(&[-1.0, -2.0]), 1.0);
        assert_eq!(p.coeffs(), &[1.0, 3.0, 2.0]);
        let mut pair = RootSet::new();
        pair.push_pair(1.0, 1.0, 1);
        assert_eq!(from_roots(&pair, 1.0).coeffs(), &[1.0, -2.0, 2.0]);
        assert_eq!(
            from_roots(&RootSet::repeated(-1.0, 3), 1.0).coeffs(),
            &[1.0, 3.0, 3.0, 1.0]
        );
        assert_eq!(from_roots(&RootSet::new(), 2.5).coeffs(), &[2.5]);
    }

    #[test]
    fn count_and_abscissa() {
        let mut set = RootSet::repeated(-3.0, 2);
        set.push_pair(-1.0, -4.0, 1);
        assert_eq!(set.count(), 4);
        assert_eq!(set.complex[0].im, 4.0);
        assert_eq!(set.abscissa(), -1.0);
        assert_eq!(set.max_real(), -3.0);
        assert_eq!(RootSet::new().abscissa(), f64::NEG_INFINITY);
    }
}
