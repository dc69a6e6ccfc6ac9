//! Transfer-function model: plants, two-parameter controllers and the
//! closed loop they form, plus validation and response computation.

mod response;

pub use response::{
    impulse_equal_poles, is_monotone, simulate_impulse, simulate_step, ResponseKind, ResponseTrace,
    SimOptions, TAU_MONO,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::feasibility::TAU_ROOT;
use crate::polycore::{from_roots, poly_gcd, real_roots, Polynomial, RootSet};

/// A pole `p` is stable when `Re(p) < -TAU_STAB * (1 + |p|)`.
pub const TAU_STAB: f64 = 1e-10;

/// Zero-pole pairs closer than this (relative to the root scale) are flagged.
pub const TAU_CANCEL: f64 = 1e-7;

/// Open-loop plant `B_o(s) / A_o(s)` with `A_o` monic.
#[derive(Clone, Debug, PartialEq)]
pub struct Plant {
    num: Polynomial,
    den: Polynomial,
    zeros: RootSet,
    poles: RootSet,
    gain: f64,
}

impl Plant {
    /// Builds a plant from numerator and denominator coefficients; both are
    /// divided by the leading denominator coefficient.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Plant> {
        let Some(n_o) = den.degree() else {
            return Err(Error::DegenerateInput("zero denominator".into()));
        };
        if let Some(m) = num.degree() {
            if m > n_o {
                return Err(Error::DegenerateInput(format!(
                    "improper plant: numerator degree {m} > denominator degree {n_o}"
                )));
            }
        }
        let lead = den.leading();
        let num = num.scale(1.0 / lead);
        let den = den.monic();
        let zeros = if num.is_zero() {
            RootSet::new()
        } else {
            real_roots(&num)?
        };
        let poles = real_roots(&den)?;
        let gain = if num.is_zero() { 0.0 } else { num.leading() };
        Ok(Plant {
            num,
            den,
            zeros,
            poles,
            gain,
        })
    }

    /// Builds `gain * prod (s - z_i) / prod (s - p_i)`.
    pub fn from_zpk(zeros: &RootSet, poles: &RootSet, gain: f64) -> Result<Plant> {
        let num = if gain == 0.0 {
            Polynomial::zero()
        } else {
            from_roots(zeros, gain)
        };
        let mut p = Plant::new(num, from_roots(poles, 1.0))?;
        if gain != 0.0 {
            p.zeros = zeros.clone();
        }
        p.poles = poles.clone();
        Ok(p)
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn zeros(&self) -> &RootSet {
        &self.zeros
    }

    pub fn poles(&self) -> &RootSet {
        &self.poles
    }

    /// `K_o`, the leading numerator coefficient over the (unit) leading denominator one.
    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Number of zeros.
    pub fn m(&self) -> usize {
        self.num.degree().unwrap_or(0)
    }

    pub fn n_o(&self) -> usize {
        self.den.degree().unwrap_or(0)
    }
}

/// Which block diagram realizes the controller with internal stability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControllerStructure {
    /// `1/G` sits inside the loop; valid when `G` is stable.
    DirectG,
    /// The alternative realization used when `G` has unstable roots.
    AlternativeG,
}

impl std::fmt::Display for ControllerStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ControllerStructure::DirectG => "direct",
            ControllerStructure::AlternativeG => "alternative",
        })
    }
}

/// Two-parameter controller `u = (Kc r - F y) / G`.
#[derive(Clone, Debug, PartialEq)]
pub struct Controller {
    pub f: Polynomial,
    pub g: Polynomial,
    pub kc: f64,
    pub n_c: usize,
    pub structure: ControllerStructure,
}

impl Controller {
    /// The order is `deg(G)`; `F` may not exceed it.
    pub fn new(f: Polynomial, g: Polynomial, kc: f64) -> Result<Controller> {
        let Some(n_c) = g.degree() else {
            return Err(Error::DegenerateInput("G must be nonzero".into()));
        };
        if f.degree().is_some_and(|d| d > n_c) {
            return Err(Error::DegenerateInput(format!(
                "deg F = {} exceeds deg G = {n_c}",
                f.deg()
            )));
        }
        let structure = if g.degree() == Some(0) || roots_stable(&real_roots(&g)?) {
            ControllerStructure::DirectG
        } else {
            ControllerStructure::AlternativeG
        };
        Ok(Controller {
            f,
            g,
            kc,
            n_c,
            structure,
        })
    }
}

/// Closed loop `K B(s) / A(s)` with `A` monic.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedLoop {
    pub num: Polynomial,
    pub den: Polynomial,
    pub gain: f64,
    pub zeros: RootSet,
    pub poles: RootSet,
}

impl ClosedLoop {
    /// Normalizes `den` to monic; the same factor divides `num`.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<ClosedLoop> {
        let Some(_) = den.degree() else {
            return Err(Error::DegenerateInput(
                "closed-loop denominator vanishes".into(),
            ));
        };
        if num.degree() > den.degree() {
            return Err(Error::DegenerateInput("improper closed loop".into()));
        }
        let num = num.scale(1.0 / den.leading());
        let den = den.monic();
        let zeros = if num.is_zero() {
            RootSet::new()
        } else {
            real_roots(&num)?
        };
        let poles = real_roots(&den)?;
        let gain = if num.is_zero() { 0.0 } else { num.leading() };
        Ok(ClosedLoop {
            num,
            den,
            gain,
            zeros,
            poles,
        })
    }

    /// Closed-loop order `n`.
    pub fn n(&self) -> usize {
        self.den.deg()
    }

    /// Number of zeros.
    pub fn m(&self) -> usize {
        self.num.degree().unwrap_or(0)
    }
}

/// A single validation finding.
#[derive(Clone, Debug, PartialEq)]
pub enum Finding {
    /// Real zeros in `[0, inf)`: monotone tracking is impossible.
    NonNegativeRealZero(Vec<f64>),
    ZeroGain,
    /// Numerator and denominator share a factor of this degree.
    NotCoprime {
        common_degree: usize,
    },
    /// A zero and a pole nearly coincide; they are not cancelled.
    NearCancellation {
        zero: Complex64,
        pole: Complex64,
    },
    /// `n_c < n_o - 1`.
    OrderTooLow {
        n_c: usize,
        min: usize,
    },
    /// `n_c <= m - n_o`, so the closed loop would not be strictly proper.
    NotStrictlyProper {
        n_c: usize,
        m: usize,
        n_o: usize,
    },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_nonneg_real_zero(&self) -> bool {
        !self.offending_roots().is_empty()
    }

    pub fn offending_roots(&self) -> Vec<f64> {
        self.findings
            .iter()
            .filter_map(|f| match f {
                Finding::NonNegativeRealZero(v) => Some(v.clone()),
                _ => None,
            })
            .flatten()
            .collect()
    }
}

/// Real zeros `x >= -TAU_ROOT * (1 + max|z|)`.
pub(crate) fn nonneg_real_zeros(zeros: &RootSet) -> Vec<f64> {
    let scale = 1.0 + zeros.max_modulus().max(0.0);
    zeros
        .real
        .iter()
        .filter(|r| r.value >= -TAU_ROOT * scale)
        .map(|r| r.value.max(0.0))
        .collect()
}

/// Checks the standing assumptions on the plant.
pub fn validate_plant(p: &Plant) -> ValidationReport {
    let mut findings = Vec::new();
    let bad = nonneg_real_zeros(&p.zeros);
    if !bad.is_empty() {
        findings.push(Finding::NonNegativeRealZero(bad));
    }
    if p.gain == 0.0 {
        findings.push(Finding::ZeroGain);
        return ValidationReport { findings };
    }
    let g = poly_gcd(&p.num, &p.den);
    if g.deg() > 0 {
        findings.push(Finding::NotCoprime {
            common_degree: g.deg(),
        });
    }
    let zs = p.zeros.expanded();
    let ps = p.poles.expanded();
    let scale = 1.0 + p.zeros.max_modulus().max(p.poles.max_modulus()).max(0.0);
    for z in &zs {
        if z.im < 0.0 {
            continue;
        }
        for q in &ps {
            if q.im >= 0.0 && (z - q).norm() < TAU_CANCEL * scale {
                findings.push(Finding::NearCancellation { zero: *z, pole: *q });
            }
        }
    }
    ValidationReport { findings }
}

/// Checks `n_c >= n_o - 1` and `n_c > m - n_o`.
pub fn validate_order(p: &Plant, n_c: usize) -> ValidationReport {
    let mut findings = Vec::new();
    let (m, n_o) = (p.m(), p.n_o());
    if n_c + 1 < n_o {
        findings.push(Finding::OrderTooLow { n_c, min: n_o - 1 });
    }
    if n_c + n_o <= m {
        findings.push(Finding::NotStrictlyProper { n_c, m, n_o });
    }
    ValidationReport { findings }
}

/// `Kc B_o / (B_o F + A_o G)`.
pub fn close_loop(p: &Plant, c: &Controller) -> Result<ClosedLoop> {
    let den = &(&p.num * &c.f) + &(&p.den * &c.g);
    let expect = c.n_c + p.n_o();
    if den.degree() != Some(expect) {
        return Err(Error::DegenerateInput(format!(
            "closed-loop denominator leading coefficient vanishes (degree {:?}, expected {expect})",
            den.degree()
        )));
    }
    let num = p.num.scale(c.kc);
    let mut cl = ClosedLoop::new(num, den)?;
    if !cl.num.is_zero() {
        cl.zeros = p.zeros.clone();
    }
    Ok(cl)
}

pub(crate) fn roots_stable(r: &RootSet) -> bool {
    r.expanded()
        .iter()
        .all(|p| p.re < -TAU_STAB * (1.0 + p.norm()))
}

/// True iff every closed-loop pole lies strictly in the open left half-plane.
pub fn is_stable(cl: &ClosedLoop) -> bool {
    roots_stable(&cl.poles)
}

/// `num(0) / den(0)`.
pub fn dc_gain(cl: &ClosedLoop) -> Result<f64> {
    let d = cl.den.constant_term();
    if d == 0.0 {
        return Err(Error::DegenerateInput(
            "pole at the origin: dc gain undefined".into(),
        ));
    }
    Ok(cl.num.constant_term() / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    #[test]
    fn plant_normalizes_denominator() {
        let p = Plant::new(poly(&[2.0, 2.0]), poly(&[2.0, 6.0, 4.0])).unwrap();
        assert_eq!(p.den().coeffs(), &[1.0, 3.0, 2.0]);
        assert_eq!(p.num().coeffs(), &[1.0, 1.0]);
        assert_eq!(p.gain(), 1.0);
        assert_eq!((p.m(), p.n_o()), (1, 2));
        assert!(Plant::new(poly(&[1.0, 0.0, 0.0]), poly(&[1.0, 1.0])).is_err());
        assert!(Plant::new(poly(&[1.0]), Polynomial::zero()).is_err());
    }

    #[test]
    fn validate_plant_examples() {
        let p = Plant::new(poly(&[1.0]), poly(&[1.0, 1.0])).unwrap();
        assert!(validate_plant(&p).is_clean());
        let p = Plant::new(poly(&[1.0, -1.0]), poly(&[1.0, 1.0])).unwrap();
        let r = validate_plant(&p);
        assert!(r.has_nonneg_real_zero());
        assert!((r.offending_roots()[0] - 1.0).abs() < 1e-12);
        let p = Plant::new(Polynomial::zero(), poly(&[1.0, 1.0])).unwrap();
        assert!(validate_plant(&p).findings.contains(&Finding::ZeroGain));
        let p = Plant::new(poly(&[1.0, 1.0]), poly(&[1.0, 3.0, 2.0])).unwrap();
        let r = validate_plant(&p);
        assert!(r
            .findings
            .contains(&Finding::NotCoprime { common_degree: 1 }));
        assert!(r
            .findings
            .iter()
            .any(|f| matches!(f, Finding::NearCancellation { .. })));
    }

    #[test]
    fn validate_order_examples() {
        let zeros = RootSet::from_real(&[-1.0, -2.0, -3.0]);
        let poles = RootSet::from_real(&[-1.5, -2.5, -3.5, -4.5, -5.5, -6.5]);
        let p = Plant::from_zpk(&zeros, &poles, 1.0).unwrap();
        assert!(validate_order(&p, 5).is_clean());
        let p = Plant::new(poly(&[1.0, 1.0]), poly(&[1.0, 3.0, 2.0])).unwrap();
        assert!(!validate_order(&p, 0).is_clean());
        // n_c = 0 with n_o = m = 1 gives a biproper loop
        let p = Plant::new(poly(&[1.0, 1.0]), poly(&[1.0, 2.0])).unwrap();
        let r = validate_order(&p, 0);
        assert_eq!(
            r.findings,
            vec![Finding::NotStrictlyProper {
                n_c: 0,
                m: 1,
                n_o: 1
            }]
        );
        let p = Plant::new(poly(&[1.0, 1.0, 1.0]), poly(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(p, Error::DegenerateInput(_)));
    }

    #[test]
    fn close_loop_examples() {
        let p = Plant::new(poly(&[1.0]), poly(&[1.0, 1.0])).unwrap();
        let c = Controller::new(Polynomial::zero(), Polynomial::one(), 1.0).unwrap();
        let cl = close_loop(&p, &c).unwrap();
        assert_eq!(cl.num.coeffs(), &[1.0]);
        assert_eq!(cl.den.coeffs(), &[1.0, 1.0]);

        // static plant: K_o f_0 + g_0 = 1 gives H = Kc K_o
        let p = Plant::new(poly(&[2.0]), Polynomial::one()).unwrap();
        let c = Controller::new(poly(&[0.25]), poly(&[0.5]), 3.0).unwrap();
        let cl = close_loop(&p, &c).unwrap();
        assert_eq!(cl.n(), 0);
        assert!((cl.gain - 6.0).abs() < 1e-15);

        // first order with n_c = 0: the pole lands between the zero and the origin
        let p = Plant::new(poly(&[1.0, 3.0]), poly(&[1.0, 1.0])).unwrap();
        let c = Controller::new(poly(&[1.0]), poly(&[1.0]), 2.0).unwrap();
        let cl = close_loop(&p, &c).unwrap();
        let pole = cl.poles.real[0].value;
        assert!(-3.0 < pole && pole < 0.0);
        assert!((pole + 2.0).abs() < 1e-12);
        assert!(cl.zeros.approx_eq(p.zeros(), 1e-12));

        // leading coefficient cancels: b0 f0 + g0 = 0
        let c = Controller::new(poly(&[1.0]), poly(&[-1.0]), 1.0).unwrap();
        assert!(close_loop(&p, &c).is_err());
    }

    #[test]
    fn structure_follows_g_stability() {
        let c = Controller::new(Polynomial::zero(), poly(&[1.0, 2.0]), 1.0).unwrap();
        assert_eq!(c.structure, ControllerStructure::DirectG);
        let c = Controller::new(Polynomial::zero(), poly(&[1.0, -2.0]), 1.0).unwrap();
        assert_eq!(c.structure, ControllerStructure::AlternativeG);
        assert!(Controller::new(poly(&[1.0, 1.0]), poly(&[1.0]), 1.0).is_err());
    }

    #[test]
    fn stability_and_dc_gain() {
        let cl = |den: &[f64], num: &[f64]| ClosedLoop::new(poly(num), poly(den)).unwrap();
        assert!(is_stable(&cl(&[1.0, 3.0, 2.0], &[1.0])));
        assert!(!is_stable(&cl(&[1.0, 1.0, 0.0], &[1.0])));
        assert!(is_stable(&cl(&[1.0, 2.0, 10.0], &[1.0])));
        assert_eq!(dc_gain(&cl(&[1.0, 2.0], &[2.0])).unwrap(), 1.0);
        assert_eq!(dc_gain(&cl(&[1.0, 3.0, 2.0], &[1.0, 1.0])).unwrap(), 0.5);
        assert!(dc_gain(&cl(&[1.0, 1.0, 0.0], &[1.0])).is_err());
    }
}
