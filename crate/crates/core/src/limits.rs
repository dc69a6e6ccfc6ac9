//! Fundamental limits: the fewest closed-loop poles that allow monotone
//! tracking, and the fastest achievable decay rate for a given order.

use crate::error::{Error, Result};
use crate::feasibility::{feasible_theorem1, feasible_with_decay, MAX_ORDER};
use crate::lti::nonneg_real_zeros;
use crate::polycore::RootSet;

/// Doubling of the decay-rate search stops at `UNBOUNDED_CAP * (1 + max|z|)`.
pub const UNBOUNDED_CAP: f64 = 1e12;

/// Relative width at which the decay-rate bisection stops.
pub const BISECTION_TOL: f64 = 1e-8;

const MAX_ITERATIONS: usize = 200;

/// Result of the order search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinOrder {
    /// Fewest closed-loop poles with a feasible verdict.
    pub n_star: usize,
    /// Controller order meeting `n_star` and the structural constraints;
    /// `None` when the plant order is not given.
    pub n_c_star: Option<usize>,
    /// The closed-form sufficient order.
    pub upper_bound: usize,
    pub iterations: usize,
}

/// Fastest decay rate for a fixed order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaStar {
    /// `-alpha_max`, or `-inf` when every tested decay rate was feasible.
    pub value: f64,
    /// Always false: the boundary itself is a supremum, only approached.
    pub attained: bool,
    pub alpha_max: f64,
    pub iterations: usize,
}

impl SigmaStar {
    pub fn is_unbounded(&self) -> bool {
        self.value == f64::NEG_INFINITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitsReport {
    pub n_star: usize,
    pub n_c_star: usize,
    pub upper_bound_n: usize,
    /// For the analysed order `n`.
    pub n: usize,
    pub sigma_star: SigmaStar,
    pub sigma_lower_bound: f64,
    pub bisection_iterations: usize,
}

fn require_no_nonneg_real_zero(zeros: &RootSet) -> Result<()> {
    let bad = nonneg_real_zeros(zeros);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::InfeasiblePlant { offending: bad })
    }
}

/// Sufficient closed-loop order: one, plus the open-LHP zeros, plus
/// `2 + floor((re/im)^2)` for every conjugate pair with `re >= 0`.
pub fn corollary1_bound(zeros: &RootSet) -> Result<usize> {
    require_no_nonneg_real_zero(zeros)?;
    let mut n = 1;
    for r in &zeros.real {
        n += r.multiplicity;
    }
    for c in &zeros.complex {
        if c.re < 0.0 {
            n += 2 * c.multiplicity;
        } else {
            let ratio = c.re / c.im;
            n += c.multiplicity * (2 + (ratio * ratio).floor() as usize);
        }
    }
    Ok(n)
}

/// Least `n` for which the transformed-numerator test passes.
///
/// With `n_o` given, also reports the smallest admissible controller order
/// `max(n* - n_o, n_o - 1, m - n_o + 1)`.
pub fn min_order(zeros: &RootSet, k: f64, n_o: Option<usize>) -> Result<MinOrder> {
    let upper_bound = corollary1_bound(zeros)?;
    let m = zeros.count();
    let feasible = |n: usize| feasible_theorem1(zeros, k, n).map(|r| r.feasible);
    let mut iterations = 0;
    let mut hi = upper_bound.min(MAX_ORDER);
    // the bound can fall short with two or more right-half-plane pairs
    while !feasible(hi)? {
        iterations += 1;
        if hi >= MAX_ORDER {
            return Err(Error::DegenerateInput(format!(
                "no feasible order up to {MAX_ORDER}"
            )));
        }
        hi += 1;
    }
    let mut lo = m; // infeasible by properness
    while hi - lo > 1 {
        iterations += 1;
        let mid = lo + (hi - lo) / 2;
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let n_c_star = n_o.map(|n_o| {
        hi.saturating_sub(n_o)
            .max(n_o.saturating_sub(1))
            .max((m + 1).saturating_sub(n_o))
    });
    Ok(MinOrder {
        n_star: hi,
        n_c_star,
        upper_bound,
        iterations,
    })
}

/// Largest real zero, or `-inf` without real zeros: no decay rate faster
/// than this is possible at any order.
pub fn sigma_lower_bound(zeros: &RootSet) -> f64 {
    zeros.max_real()
}

/// Fastest decay rate `sigma*(z, n)` by bisection over the zero shift `alpha`.
pub fn sigma_star(zeros: &RootSet, k: f64, n: usize) -> Result<SigmaStar> {
    let feasible = |alpha: f64| feasible_with_decay(zeros, k, n, alpha).map(|r| r.feasible);
    if !feasible(0.0)? {
        return Err(Error::InfeasibleAtAlphaZero { n });
    }
    let cap = UNBOUNDED_CAP * (1.0 + zeros.max_modulus());
    let mut iterations = 0;
    let (mut lo, mut hi) = (0.0, 1.0);
    while feasible(hi)? {
        iterations += 1;
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return Ok(SigmaStar {
                value: f64::NEG_INFINITY,
                attained: false,
                alpha_max: f64::INFINITY,
                iterations,
            });
        }
    }
    while hi - lo > BISECTION_TOL * (1.0 + lo) {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::ConvergenceFailure {
                what: "decay-rate bisection".into(),
                lo,
                hi,
            });
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha_max = 0.5 * (lo + hi);
    Ok(SigmaStar {
        value: -alpha_max,
        attained: false,
        alpha_max,
        iterations,
    })
}

/// `re - |im| sqrt(n - 2)`, the fastest decay rate for a single conjugate pair of zeros.
pub fn sigma_star_m2_closed_form(re: f64, im: f64, n: usize) -> Result<f64> {
    if im == 0.0 || !im.is_finite() || !re.is_finite() {
        return Err(Error::DegenerateInput(format!(
            "need a non-real zero pair, got {re} ± {im}i"
        )));
    }
    if n < 3 {
        return Err(Error::DegenerateInput(format!("need n >= 3, got {n}")));
    }
    Ok(re - im.abs() * ((n - 2) as f64).sqrt())
}

/// Order search and decay-rate limit together, for a plant of order `n_o`
/// and a closed loop of order `n`.
pub fn limits_report(zeros: &RootSet, k: f64, n_o: usize, n: usize) -> Result<LimitsReport> {
    let mo = min_order(zeros, k, Some(n_o))?;
    let ss = sigma_star(zeros, k, n)?;
    Ok(LimitsReport {
        n_star: mo.n_star,
        n_c_star: mo.n_c_star.unwrap_or(0),
        upper_bound_n: mo.upper_bound,
        n,
        sigma_star: ss,
        sigma_lower_bound: sigma_lower_bound(zeros),
        bisection_iterations: ss.iterations,
    })
}
