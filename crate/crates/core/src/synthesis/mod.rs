//! Controller synthesis: equal real closed-loop poles placed through the
//! Sylvester-type linear system, then the static gain for unit dc gain.

mod placement;

pub use placement::{
    build_m, char_poly, design_kc, place_poles, Placement, PlacementSystem, COND_LIMIT,
    RESIDUAL_LIMIT,
};

use crate::error::{Error, Result};
use crate::feasibility::{feasible_theorem1, feasible_with_decay, pir_equal_poles};
use crate::limits::{min_order, sigma_star};
use crate::lti::{
    close_loop, dc_gain, is_monotone, is_stable, simulate_step, validate_order, validate_plant,
    ClosedLoop, Controller, Finding, Plant, SimOptions,
};
use crate::polycore::{from_roots, RootSet};

/// Tolerated `|dc gain - 1|` for a passing report.
pub const DC_GAIN_TOL: f64 = 1e-9;

const MAX_SHRINK: usize = 100;
const MAX_DEEPEN: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checks {
    pub stable: bool,
    pub dc_gain_error: f64,
    /// Non-negativity of `Q(sigma, t)` at the placed pole.
    pub monotone_analytic: bool,
    /// Monotonicity of the simulated step response.
    pub monotone_simulated: bool,
}

impl Checks {
    pub fn all_pass(&self) -> bool {
        self.stable
            && self.dc_gain_error <= DC_GAIN_TOL
            && self.monotone_analytic
            && self.monotone_simulated
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisReport {
    pub controller: Controller,
    /// The common location of all closed-loop poles.
    pub sigma_chosen: f64,
    /// Fastest decay rate at this order; `-inf` when unbounded.
    pub sigma_star: f64,
    pub n: usize,
    pub closed_loop: ClosedLoop,
    pub checks: Checks,
    pub residual: f64,
    pub condition: f64,
    /// Largest real part among the computed closed-loop poles.
    pub abscissa: f64,
}

fn check_inputs(plant: &Plant, n_c: usize) -> Result<()> {
    let report = validate_plant(plant);
    for f in &report.findings {
        match f {
            Finding::ZeroGain => return Err(Error::DegenerateInput("plant gain is zero".into())),
            Finding::NonNegativeRealZero(v) => {
                return Err(Error::InfeasiblePlant {
                    offending: v.clone(),
                })
            }
            Finding::NotCoprime { .. } => {
                return Err(Error::RankDeficient {
                    condition: f64::INFINITY,
                })
            }
            _ => {}
        }
    }
    let order = validate_order(plant, n_c);
    if let Some(f) = order.findings.first() {
        return Err(Error::OrderConstraint(match f {
            Finding::OrderTooLow { n_c, min } => format!("n_c = {n_c} < n_o - 1 = {min}"),
            Finding::NotStrictlyProper { n_c, m, n_o } => {
                format!("n_c = {n_c} <= m - n_o = {m} - {n_o}: closed loop not strictly proper")
            }
            other => format!("{other:?}"),
        }));
    }
    Ok(())
}

/// Picks the common pole location and certifies it.
fn choose_sigma(
    zeros: &RootSet,
    n: usize,
    alpha: Option<f64>,
    sstar: f64,
    scale: f64,
) -> Result<f64> {
    let floor = alpha.unwrap_or(0.0);
    let mut sigma = match alpha {
        None if sstar.is_finite() => 0.5 * sstar,
        None => -scale,
        Some(a) => -(a + 0.5 * (sstar.abs() - a).min(0.1 * a + 0.1)),
    };
    let b = from_roots(zeros, 1.0);
    for _ in 0..MAX_SHRINK {
        if pir_equal_poles(&b, 1.0, sigma, n)? {
            return Ok(sigma);
        }
        sigma = -floor + 0.5 * (sigma + floor);
    }
    Err(Error::ConvergenceFailure {
        what: "certified pole location".into(),
        lo: sigma,
        hi: -floor,
    })
}

/// Places all `n` poles at `sigma` and closes the loop.
fn realize(
    plant: &Plant,
    n_c: usize,
    n: usize,
    sigma: f64,
) -> Result<(Controller, Placement, ClosedLoop)> {
    let placement = place_poles(plant, &RootSet::repeated(sigma, n), n_c)?;
    let kc = design_kc(plant, &placement.f, &placement.g)?;
    let gain = kc * plant.gain();
    if gain.is_nan() || gain <= 0.0 {
        return Err(Error::InconsistentGain { gain });
    }
    let controller = Controller::new(placement.f.clone(), placement.g.clone(), kc)?;
    if controller.n_c != n_c {
        return Err(Error::DegenerateInput(format!(
            "placed G has degree {} instead of {n_c}",
            controller.n_c
        )));
    }
    let cl = close_loop(plant, &controller)?;
    Ok((controller, placement, cl))
}

/// Controller of order `n_c` giving a stable, monotone, unit-gain loop,
/// optionally with every pole faster than `-alpha`.
pub fn synthesize(plant: &Plant, n_c: usize, alpha: Option<f64>) -> Result<SynthesisReport> {
    if let Some(a) = alpha {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::DegenerateInput(format!(
                "alpha must be finite and >= 0, got {a}"
            )));
        }
    }
    check_inputs(plant, n_c)?;
    let zeros = plant.zeros();
    let n = n_c + plant.n_o();
    let verdict = feasible_with_decay(zeros, 1.0, n, alpha.unwrap_or(0.0))?;
    if !verdict.feasible {
        if alpha.is_some() && feasible_theorem1(zeros, 1.0, n)?.feasible {
            let s = sigma_star(zeros, 1.0, n)?;
            return Err(Error::InfeasibleDecay {
                alpha: alpha.unwrap_or(0.0),
                max_alpha: s.alpha_max,
            });
        }
        let mo = min_order(zeros, 1.0, Some(plant.n_o()))?;
        return Err(Error::InfeasibleOrder {
            n,
            n_star: mo.n_star,
        });
    }
    let sstar = sigma_star(zeros, 1.0, n)?.value;
    let scale = 1f64
        .max(zeros.max_modulus())
        .max(plant.poles().max_modulus());
    let mut sigma = choose_sigma(zeros, n, alpha, sstar, scale)?;
    let b = from_roots(zeros, 1.0);
    let mut attempt = 0;
    let (controller, placement, cl, monotone_simulated) = loop {
        let (controller, placement, cl) = realize(plant, n_c, n, sigma)?;
        let target = -alpha.unwrap_or(0.0);
        let abscissa = cl.poles.abscissa();
        let monotone = abscissa < 0.0 && is_monotone(&simulate_step(&cl, &SimOptions::default())?)?;
        let deeper = if sstar.is_finite() {
            0.5 * (sigma + sstar)
        } else {
            2.0 * sigma
        };
        let done = (abscissa < target && monotone) || attempt == MAX_DEEPEN;
        if done || !pir_equal_poles(&b, 1.0, deeper, n)? {
            if alpha.is_some() && abscissa >= target {
                return Err(Error::DecayNotRealized {
                    alpha: -target,
                    abscissa,
                });
            }
            break (controller, placement, cl, monotone);
        }
        sigma = deeper;
        attempt += 1;
    };
    let stable = is_stable(&cl);
    let dc_gain_error = (dc_gain(&cl)? - 1.0).abs();
    let monotone_analytic = pir_equal_poles(&cl.num.monic(), cl.gain, sigma, n)?;
    let abscissa = cl.poles.abscissa();
    Ok(SynthesisReport {
        controller,
        sigma_chosen: sigma,
        sigma_star: sstar,
        n,
        closed_loop: cl,
        checks: Checks {
            stable,
            dc_gain_error,
            monotone_analytic,
            monotone_simulated,
        },
        residual: placement.residual,
        condition: placement.condition,
        abscissa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::Polynomial;

    #[test]
    fn no_zero_plant_passes_all_checks() {
        let p = Plant::from_zpk(&RootSet::new(), &RootSet::from_real(&[-1.0, -4.0]), 1.0).unwrap();
        let r = synthesize(&p, 1, None).unwrap();
        assert!(r.checks.all_pass(), "{:?}", r.checks);
        assert!(r
            .closed_loop
            .poles
            .approx_eq(&RootSet::repeated(r.sigma_chosen, 3), 1e-6));
    }

    #[test]
    fn nonnegative_zero_is_infeasible() {
        let p = Plant::new(
            Polynomial::new(vec![1.0, -1.0]),
            Polynomial::new(vec![1.0, 3.0, 2.0]),
        )
        .unwrap();
        assert!(matches!(
            synthesize(&p, 1, None),
            Err(Error::InfeasiblePlant { .. })
        ));
    }

    #[test]
    fn order_and_decay_errors() {
        let mut z = RootSet::new();
        z.push_pair(1.0, 1.0, 1);
        let p = Plant::from_zpk(&z, &RootSet::from_real(&[-1.0, -2.0]), 1.0).unwrap();
        assert!(matches!(
            synthesize(&p, 1, None),
            Err(Error::InfeasibleOrder { n: 3, n_star: 4 })
        ));
        assert!(synthesize(&p, 2, None).unwrap().checks.all_pass());

        let p = Plant::from_zpk(
            &RootSet::from_real(&[-2.0]),
            &RootSet::from_real(&[-1.0, -3.0]),
            1.0,
        )
        .unwrap();
        assert!(matches!(
            synthesize(&p, 1, Some(3.0)),
            Err(Error::InfeasibleDecay { .. })
        ));
        let r = synthesize(&p, 1, Some(1.5)).unwrap();
        assert!(r.checks.all_pass());
        assert!(r.abscissa < -1.5);
        assert!(matches!(
            synthesize(&p, 0, None),
            Err(Error::OrderConstraint(_))
        ));
    }
}
