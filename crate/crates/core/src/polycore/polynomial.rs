use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Relative threshold below which a leading coefficient produced by
/// cancellation is treated as an exact zero.
pub const EPS_TRIM: f64 = 1e-13;

/// Real univariate polynomial, coefficients stored highest degree first.
///
/// The zero polynomial has no coefficients and `degree() == None`. Nonzero
/// polynomials never carry a zero leading coefficient.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from coefficients, highest degree first.
    /// Exact leading zeros are stripped.
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs = coeffs.into();
        let lead = coeffs
            .iter()
            .position(|&c| c != 0.0)
            .unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        Polynomial { coeffs }
    }

    /// Builds a polynomial from coefficients in ascending order (`c[k]` multiplies `s^k`).
    pub fn from_ascending(coeffs: &[f64]) -> Self {
        Polynomial::new(coeffs.iter().rev().copied().collect::<Vec<_>>())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn one() -> Self {
        Polynomial::constant(1.0)
    }

    /// The monic linear factor `s - root`.
    pub fn linear(root: f64) -> Self {
        Polynomial {
            coeffs: vec![1.0, -root],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub(crate) fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    /// Coefficients, highest degree first.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficients in ascending order.
    pub fn ascending(&self) -> Vec<f64> {
        self.coeffs.iter().rev().copied().collect()
    }

    /// Coefficient of `s^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        match self.degree() {
            Some(d) if k <= d => self.coeffs[d - k],
            _ => 0.0,
        }
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.first().copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `k`-th formal derivative.
    pub fn derivative(&self, k: usize) -> Polynomial {
        let d = match self.degree() {
            Some(d) if d >= k => d,
            _ => return Polynomial::zero(),
        };
        let coeffs = (0..=d - k)
            .map(|i| {
                let power = d - i;
                let falling: f64 = (0..k).map(|j| (power - j) as f64).product();
                self.coeffs[i] * falling
            })
            .collect::<Vec<_>>();
        Polynomial::new(coeffs)
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|x| x * c).collect::<Vec<_>>())
    }

    /// Divides by the leading coefficient. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(1.0 / self.leading())
    }

    /// Rescales by a power of two so the largest coefficient magnitude is
    /// near one. The scaling is exact and preserves signs.
    pub(crate) fn normalized(&self) -> Polynomial {
        let n = self.norm_inf();
        if n == 0.0 || !n.is_finite() {
            self.clone()
        } else {
            self.scale(pow2_near(1.0 / n))
        }
    }

    /// `p(rho * x)`, the polynomial with its variable scaled.
    pub fn scale_variable(&self, rho: f64) -> Polynomial {
        let d = self.deg();
        let mut out = self.coeffs.clone();
        let mut factor = 1.0;
        for k in (0..=d).rev() {
            // out[k] multiplies x^(d-k)
            out[k] *= factor;
            factor *= rho;
        }
        Polynomial::new(out)
    }

    /// Drops leading coefficients that are tiny relative to `reference`.
    pub(crate) fn trim_relative(mut self, reference: f64, eps: f64) -> Polynomial {
        let cut = eps * reference;
        let lead = self
            .coeffs
            .iter()
            .position(|c| c.abs() > cut)
            .unwrap_or(self.coeffs.len());
        self.coeffs.drain(..lead);
        self
    }

    /// Sum with cancellation-aware trimming: a resulting leading coefficient
    /// is zeroed when it is below `EPS_TRIM` times the operand magnitudes at
    /// that position.
    pub fn add_trimmed(&self, other: &Polynomial, sign: f64) -> Polynomial {
        let d = self.deg().max(other.deg());
        let mut out = Vec::with_capacity(d + 1);
        let mut mags = Vec::with_capacity(d + 1);
        for k in (0..=d).rev() {
            let a = self.coeff(k);
            let b = sign * other.coeff(k);
            out.push(a + b);
            mags.push(a.abs() + b.abs());
        }
        let lead = out
            .iter()
            .zip(&mags)
            .position(|(c, m)| c.abs() > EPS_TRIM * m)
            .unwrap_or(out.len());
        Polynomial::new(out.split_off(lead))
    }

    /// Long division returning `(quotient, remainder)`.
    ///
    /// Remainder coefficients that fall below `EPS_TRIM` times the dividend
    /// magnitude are trimmed from the leading end.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.deg();
        let Some(dn) = self.degree() else {
            return (Polynomial::zero(), Polynomial::zero());
        };
        if dn < dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let lead = divisor.leading();
        let mut quot = vec![0.0; dn - dd + 1];
        for i in 0..=dn - dd {
            let q = rem[i] / lead;
            quot[i] = q;
            rem[i] = 0.0;
            for j in 1..=dd {
                rem[i + j] -= q * divisor.coeffs[j];
            }
        }
        let reference = self.norm_inf();
        let remainder =
            Polynomial::new(rem.split_off(dn - dd + 1)).trim_relative(reference, EPS_TRIM);
        (Polynomial::new(quot), remainder)
    }

    /// Composition `p(q(s))`.
    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        self.coeffs.iter().fold(Polynomial::zero(), |acc, &c| {
            &(&acc * inner) + &Polynomial::constant(c)
        })
    }
}

impl From<Vec<f64>> for Polynomial {
    fn from(v: Vec<f64>) -> Self {
        Polynomial::new(v)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.add_trimmed(rhs, 1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.add_trimmed(rhs, -1.0)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree() else {
            return write!(f, "0");
        };
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let power = d - i;
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match power {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1.0 {
                        write!(f, "{a}*")?;
                    }
                    if power == 1 {
                        write!(f, "s")?;
                    } else {
                        write!(f, "s^{power}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Geometric-mean root magnitude, used to balance coefficients before
/// numerically delicate work. Roots at the origin are ignored.
pub(crate) fn root_scale(p: &Polynomial) -> f64 {
    let c = p.coeffs();
    let last = c.iter().rposition(|&x| x != 0.0).unwrap_or(0);
    if last == 0 {
        return 1.0;
    }
    let rho = (c[last] / c[0]).abs().powf(1.0 / last as f64);
    if rho.is_finite() && rho > 0.0 {
        pow2_near(rho)
    } else {
        1.0
    }
}

/// Nearest power of two, so scaling by it is exact in floating point.
pub(crate) fn pow2_near(x: f64) -> f64 {
    2f64.powi(x.log2().round() as i32)
}
