use std::fs;
use std::path::Path;

use monotrack_core::{
    close_loop, feasible_with_decay, is_monotone, is_stable, limits_report, min_order,
    simulate_step, synthesize, validate_order, validate_plant, Error as CoreError, Finding, Plant,
    SimOptions, SynthesisReport,
};

use crate::error::{core_exit_code, CliError, Result};
use crate::files::{format_controller, parse_controller, parse_plant};
use crate::report::{reals, roots, roots_short, Report};

/// `dt * max|pole|` above this is clamped in `respond`.
pub const DT_LIMIT: f64 = 0.5;

pub struct Outcome {
    pub code: u8,
    pub report: Report,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn new(code: u8, report: Report, warnings: Vec<String>) -> Outcome {
        Outcome {
            code,
            report,
            warnings,
        }
    }
}

/// Closed-loop order given directly or through the controller order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    N(usize),
    Nc(usize),
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// Parse errors are prefixed with the file name.
pub fn load_plant(path: &Path) -> Result<Plant> {
    parse_plant(&read(path)?).map_err(|e| in_file(path, e))
}

fn in_file(path: &Path, e: CliError) -> CliError {
    match e {
        CliError::Parse { line, msg } => CliError::Parse {
            line,
            msg: format!("{msg} (in {})", path.display()),
        },
        other => other,
    }
}

fn plant_warnings(plant: &Plant) -> Vec<String> {
    validate_plant(plant)
        .findings
        .iter()
        .filter_map(|f| match f {
            Finding::NotCoprime { common_degree } => Some(format!(
                "numerator and denominator share a factor of degree {common_degree}"
            )),
            Finding::NearCancellation { zero, pole } => Some(format!(
                "zero {zero} nearly cancels pole {pole}; they are kept"
            )),
            _ => None,
        })
        .collect()
}

fn order_message(f: &Finding) -> String {
    match f {
        Finding::OrderTooLow { n_c, min } => {
            format!("controller order n_c = {n_c} is below n_o - 1 = {min}")
        }
        Finding::NotStrictlyProper { n_c, m, n_o } => format!(
            "controller order n_c = {n_c} leaves the closed loop improper (needs n_c > m - n_o = {m} - {n_o})"
        ),
        other => format!("{other:?}"),
    }
}

/// `(n, n_c)`; `n_c` is unknown when `n < n_o`.
fn resolve(plant: &Plant, order: Order) -> Result<(usize, Option<usize>)> {
    let (n_o, m) = (plant.n_o(), plant.m());
    let (n, n_c) = match order {
        Order::N(n) => (n, n.checked_sub(n_o)),
        Order::Nc(n_c) => {
            if let Some(f) = validate_order(plant, n_c).findings.first() {
                return Err(CliError::Usage(order_message(f)));
            }
            (n_c + n_o, Some(n_c))
        }
    };
    if n <= m {
        return Err(CliError::Usage(format!(
            "n = {n} closed-loop poles do not exceed the {m} plant zeros; the loop must be strictly proper"
        )));
    }
    Ok((n, n_c))
}

fn check_alpha(alpha: Option<f64>) -> Result<f64> {
    match alpha {
        None => Ok(0.0),
        Some(a) if a >= 0.0 && a.is_finite() => Ok(a),
        Some(a) => Err(CliError::Usage(format!(
            "--alpha must be finite and >= 0, got {a}"
        ))),
    }
}

fn describe_order(r: &mut Report, plant: &Plant, n: usize, n_c: Option<usize>) {
    r.put_int("n", n)
        .put_int("n_o", plant.n_o())
        .put_int("m", plant.m());
    match n_c {
        Some(c) => r.put_int("n_c", c),
        None => r.put("n_c", "none"),
    };
}

/// Report for a plant with real non-negative zeros.
fn nonneg_zero_report(cmd: &str, offending: &[f64]) -> Outcome {
    let mut r = Report::new(cmd);
    r.say(format!(
        "infeasible: the plant has real non-negative zeros {}",
        offending
            .iter()
            .map(|v| format!("{v:.6}"))
            .collect::<Vec<_>>()
            .join(", ")
    ))
    .say("no controller of any order gives a stable, monotone step response");
    r.put("verdict", "infeasible")
        .put("reason", "nonnegative_real_zero")
        .put("offending_zeros", reals(offending));
    Outcome::new(2, r, Vec::new())
}

pub fn feasible(plant: &Plant, order: Order, alpha: Option<f64>) -> Result<Outcome> {
    let a = check_alpha(alpha)?;
    let (n, n_c) = resolve(plant, order)?;
    let rep = feasible_with_decay(plant.zeros(), 1.0, n, a)?;
    let nonneg: Vec<f64> = plant
        .zeros()
        .real
        .iter()
        .map(|z| z.value)
        .filter(|&v| v >= 0.0)
        .collect();
    let mut r = Report::new("feasible");
    let decay = if a > 0.0 {
        format!(" with every pole left of -{a}")
    } else {
        String::new()
    };
    if rep.feasible {
        r.say(format!(
            "feasible: a stable, monotone, unit-gain loop with n = {n} closed-loop poles{decay} exists"
        ));
    } else {
        r.say(format!(
            "infeasible: no loop with n = {n} closed-loop poles{decay} is monotone"
        ));
        if !nonneg.is_empty() {
            r.say(format!(
                "the plant has real non-negative zeros ({}); no controller order can help",
                nonneg
                    .iter()
                    .map(|v| format!("{v:.6}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        r.say(format!(
            "transformed numerator has non-negative real roots: {}",
            rep.offending_roots
                .iter()
                .map(|v| format!("{v:.6}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    r.say(format!("plant zeros: {}", roots_short(plant.zeros())));
    r.put(
        "verdict",
        if rep.feasible {
            "feasible"
        } else {
            "infeasible"
        },
    );
    describe_order(&mut r, plant, n, n_c);
    r.put_real("alpha", a)
        .put("zeros", roots(plant.zeros()))
        .put("btilde", reals(rep.btilde.coeffs()))
        .put("offending_roots", reals(&rep.offending_roots))
        .put("nonnegative_real_zeros", reals(&nonneg));
    Ok(Outcome::new(
        if rep.feasible { 0 } else { 2 },
        r,
        plant_warnings(plant),
    ))
}

pub fn min_order_cmd(plant: &Plant) -> Result<Outcome> {
    let mo = match min_order(plant.zeros(), 1.0, Some(plant.n_o())) {
        Ok(mo) => mo,
        Err(CoreError::InfeasiblePlant { offending }) => {
            return Ok(nonneg_zero_report("min-order", &offending))
        }
        Err(e) => return Err(e.into()),
    };
    let n_c = mo.n_c_star.unwrap_or(0);
    let mut r = Report::new("min-order");
    r.say(format!("minimum closed-loop order n* = {}", mo.n_star))
        .say(format!(
            "minimum controller order n_c* = {n_c} for a plant of order {}",
            plant.n_o()
        ))
        .say(format!(
            "sufficient order from the zero locations: {}",
            mo.upper_bound
        ));
    if n_c + plant.n_o() > mo.n_star {
        r.say(format!(
            "n_c* is raised to {n_c} by the realizability constraints (n_c >= n_o - 1, n_c > m - n_o)"
        ));
    }
    r.put("verdict", "feasible")
        .put_int("n_star", mo.n_star)
        .put_int("n_c_star", n_c)
        .put_int("upper_bound_n", mo.upper_bound)
        .put_int("n_o", plant.n_o())
        .put_int("m", plant.m())
        .put_int("iterations", mo.iterations);
    Ok(Outcome::new(0, r, plant_warnings(plant)))
}

pub fn decay(plant: &Plant, order: Order) -> Result<Outcome> {
    let (n, n_c) = resolve(plant, order)?;
    let lim = match limits_report(plant.zeros(), 1.0, plant.n_o(), n) {
        Ok(l) => l,
        Err(CoreError::InfeasiblePlant { offending }) => {
            return Ok(nonneg_zero_report("decay", &offending))
        }
        Err(CoreError::InfeasibleAtAlphaZero { .. }) => {
            let mo = min_order(plant.zeros(), 1.0, Some(plant.n_o()))?;
            let mut r = Report::new("decay");
            r.say(format!(
                "infeasible: n = {n} closed-loop poles cannot give a monotone response (minimum is {})",
                mo.n_star
            ));
            r.put("verdict", "infeasible")
                .put("reason", "order_too_low")
                .put_int("n_star", mo.n_star);
            describe_order(&mut r, plant, n, n_c);
            return Ok(Outcome::new(2, r, plant_warnings(plant)));
        }
        Err(e) => return Err(e.into()),
    };
    let s = lim.sigma_star;
    let mut r = Report::new("decay");
    if s.is_unbounded() {
        r.say(format!(
            "fastest decay rate with n = {n} closed-loop poles: unbounded"
        ));
    } else {
        r.say(format!(
            "fastest decay rate with n = {n} closed-loop poles: sigma* = {:.6}",
            s.value
        ))
        .say("this is a supremum: poles can approach it but not reach it");
    }
    if lim.sigma_lower_bound.is_finite() {
        r.say(format!(
            "no order does better than the largest real zero, {:.6}",
            lim.sigma_lower_bound
        ));
    } else {
        r.say("without real zeros, more poles allow arbitrarily fast decay");
    }
    r.put("verdict", "feasible");
    describe_order(&mut r, plant, n, n_c);
    r.put_real("sigma_star", s.value)
        .put_real("alpha_max", s.alpha_max)
        .put_bool("attained", s.attained)
        .put_real("sigma_lower_bound", lim.sigma_lower_bound)
        .put_int("n_star", lim.n_star)
        .put_int("n_c_star", lim.n_c_star)
        .put_int("upper_bound_n", lim.upper_bound_n)
        .put_int("bisection_iterations", lim.bisection_iterations);
    Ok(Outcome::new(0, r, plant_warnings(plant)))
}

fn synth_infeasible(e: &CoreError, alpha: Option<f64>) -> Option<Outcome> {
    let mut r = Report::new("synth");
    match e {
        CoreError::InfeasiblePlant { offending } => {
            let mut o = nonneg_zero_report("synth", offending);
            o.report.put("controller_written", "false");
            return Some(o);
        }
        CoreError::InfeasibleOrder { n, n_star } => {
            r.say(format!(
                "infeasible: n = {n} closed-loop poles are too few; at least {n_star} are needed"
            ));
            r.put("verdict", "infeasible")
                .put("reason", "order_too_low")
                .put_int("n", *n)
                .put_int("n_star", *n_star);
        }
        CoreError::InfeasibleDecay {
            alpha: a,
            max_alpha,
        } => {
            r.say(format!(
                "infeasible: decay rate alpha = {a} exceeds the fastest achievable {max_alpha:.6}"
            ));
            r.put("verdict", "infeasible")
                .put("reason", "decay_too_fast")
                .put_real("alpha", alpha.unwrap_or(*a))
                .put_real("alpha_max", *max_alpha);
        }
        _ => return None,
    }
    r.put("controller_written", "false");
    Some(Outcome::new(core_exit_code(e), r, Vec::new()))
}

fn synth_report(plant: &Plant, rep: &SynthesisReport, written: Option<&Path>) -> Report {
    let c = &rep.controller;
    let ch = rep.checks;
    let mut r = Report::new("synth");
    r.say(format!(
        "controller of order {} placing all {} closed-loop poles at {:.6}",
        c.n_c, rep.n, rep.sigma_chosen
    ));
    if rep.sigma_star.is_finite() {
        r.say(format!(
            "fastest decay rate at this order: {:.6}",
            rep.sigma_star
        ));
    } else {
        r.say("fastest decay rate at this order: unbounded");
    }
    r.say(format!(
        "checks: stable {}, |dc gain - 1| = {:.1e}, analytic monotone {}, simulated monotone {}",
        ch.stable, ch.dc_gain_error, ch.monotone_analytic, ch.monotone_simulated
    ));
    match written {
        Some(p) => r.say(format!("controller written to {}", p.display())),
        None if !ch.all_pass() => r.say("checks failed; no controller file written"),
        None => r.say(format_controller(c).trim_end().to_string()),
    };
    r.put(
        "verdict",
        if ch.all_pass() {
            "synthesized"
        } else {
            "checks_failed"
        },
    )
    .put_int("n", rep.n)
    .put_int("n_c", c.n_c)
    .put_int("n_o", plant.n_o())
    .put("F", reals(c.f.coeffs()))
    .put("G", reals(c.g.coeffs()))
    .put_real("Kc", c.kc)
    .put("structure", c.structure.to_string())
    .put_real("sigma_chosen", rep.sigma_chosen)
    .put_real("sigma_star", rep.sigma_star)
    .put_real("abscissa", rep.abscissa)
    .put_bool("stable", ch.stable)
    .put_real("dc_gain_error", ch.dc_gain_error)
    .put_bool("monotone_analytic", ch.monotone_analytic)
    .put_bool("monotone_simulated", ch.monotone_simulated)
    .put_real("residual", rep.residual)
    .put_real("condition", rep.condition)
    .put_bool("controller_written", written.is_some());
    r
}

pub fn synth(plant: &Plant, n_c: usize, alpha: Option<f64>, out: Option<&Path>) -> Result<Outcome> {
    check_alpha(alpha)?;
    let rep = match synthesize(plant, n_c, alpha) {
        Ok(rep) => rep,
        Err(e) => {
            if let Some(o) = synth_infeasible(&e, alpha) {
                return Ok(o);
            }
            return Err(match e {
                CoreError::OrderConstraint(msg) => CliError::Usage(msg),
                other => other.into(),
            });
        }
    };
    let pass = rep.checks.all_pass();
    let written = match (out, pass) {
        (Some(path), true) => {
            fs::write(path, format_controller(&rep.controller)).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                msg: e.to_string(),
            })?;
            Some(path)
        }
        _ => None,
    };
    let report = synth_report(plant, &rep, written);
    Ok(Outcome::new(
        if pass { 0 } else { 3 },
        report,
        plant_warnings(plant),
    ))
}

pub fn respond(
    plant: &Plant,
    controller_path: &Path,
    t_end: Option<f64>,
    dt: Option<f64>,
    csv: Option<&Path>,
) -> Result<Outcome> {
    let file =
        parse_controller(&read(controller_path)?).map_err(|e| in_file(controller_path, e))?;
    let ctrl = file.controller;
    let mut warnings = plant_warnings(plant);
    if let Some(d) = file.declared {
        if d != ctrl.structure {
            warnings.push(format!(
                "controller file declares structure `{d}` but G calls for `{}`",
                ctrl.structure
            ));
        }
    }
    let cl = close_loop(plant, &ctrl)?;
    if !is_stable(&cl) {
        return Err(CliError::Unstable {
            abscissa: cl.poles.abscissa(),
        });
    }
    for (name, v) in [("--tend", t_end), ("--dt", dt)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
    }
    let limit = DT_LIMIT / cl.poles.max_modulus().max(f64::MIN_POSITIVE);
    let dt = dt.map(|d| {
        if d > limit {
            warnings.push(format!(
                "dt = {d} exceeds the integration limit {limit:.6e} (0.5 / max|pole|); clamped"
            ));
            limit
        } else {
            d
        }
    });
    let tr = simulate_step(&cl, &SimOptions { t_end, dt })?;
    let monotone = is_monotone(&tr)?;
    if let Some(path) = csv {
        let f = fs::File::create(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        tr.write_csv(std::io::BufWriter::new(f))?;
    }
    let peak = tr.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let step = tr.times.get(1).copied().unwrap_or(0.0) - tr.times[0];
    let mut r = Report::new("respond");
    r.say(format!(
        "step response over [0, {:.6}] with {} samples: {}",
        tr.times.last().copied().unwrap_or(0.0),
        tr.len(),
        if monotone { "monotone" } else { "NOT monotone" }
    ))
    .say(format!(
        "final value {:.12}, peak {:.12}",
        tr.final_value(),
        peak
    ));
    if let Some(path) = csv {
        r.say(format!("trace written to {}", path.display()));
    }
    r.put_bool("monotone", monotone)
        .put_bool("stable", true)
        .put_real("abscissa", cl.poles.abscissa())
        .put_real("final_value", tr.final_value())
        .put_real("peak", peak)
        .put_real("t_end", tr.times.last().copied().unwrap_or(0.0))
        .put_real("dt", step)
        .put_int("samples", tr.len())
        .put("poles", roots(&cl.poles));
    Ok(Outcome::new(0, r, warnings))
}
