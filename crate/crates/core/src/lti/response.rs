use std::io::Write;

use super::{roots_stable, ClosedLoop};
use crate::error::{Error, Result};
use crate::feasibility::build_q;
use crate::polycore::{root_scale, Polynomial};

/// Relative tolerance on backward steps in a monotone step response.
pub const TAU_MONO: f64 = 1e-7;

const MAX_STEPS: usize = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResponseKind {
    Impulse,
    Step,
}

/// Sampled time response.
#[derive(Clone, Debug, PartialEq)]
pub struct ResponseTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: ResponseKind,
}

impl ResponseTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Writes `t,y` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let io = |e: csv::Error| Error::Io(e.to_string());
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "y"]).map_err(io)?;
        for (t, y) in self.times.iter().zip(&self.values) {
            out.write_record([format!("{t:.16e}"), format!("{y:.16e}")])
                .map_err(io)?;
        }
        out.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Simulation horizon and step; `None` picks the defaults.
///
/// The default horizon is `40 / |abscissa|`, long enough for the slowest
/// mode to decay to about `4e-18`. The default step keeps
/// `dt * max|p| <= 0.05`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SimOptions {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
}

impl SimOptions {
    pub fn default_t_end(cl: &ClosedLoop) -> f64 {
        if cl.poles.is_empty() {
            1.0
        } else {
            40.0 / cl.poles.abscissa().abs()
        }
    }

    pub fn default_dt(cl: &ClosedLoop) -> f64 {
        if cl.poles.is_empty() {
            0.01
        } else {
            0.05 / cl.poles.max_modulus()
        }
    }

    /// Resolved `(t_end, dt, steps)` with `dt` shrunk so that `steps * dt == t_end`.
    pub fn resolve(&self, cl: &ClosedLoop) -> Result<(f64, f64, usize)> {
        let t_end = self.t_end.unwrap_or_else(|| SimOptions::default_t_end(cl));
        let dt = self.dt.unwrap_or_else(|| SimOptions::default_dt(cl));
        if !(t_end > 0.0 && t_end.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::DegenerateInput(format!(
                "t_end and dt must be positive and finite (t_end = {t_end}, dt = {dt})"
            )));
        }
        let ratio = t_end / dt;
        if ratio > MAX_STEPS as f64 {
            return Err(Error::DegenerateInput(format!(
                "{ratio:.3e} integration steps exceed the limit of {MAX_STEPS}"
            )));
        }
        let steps = ((ratio * (1.0 - 1e-12)).ceil() as usize).max(1);
        Ok((t_end, t_end / steps as f64, steps))
    }
}

/// Closed-form impulse response of `B(s) / (s - sigma)^n` at `t >= 0`:
/// `h(t) = e^(sigma t) t^(n-1-m) Q(sigma, t) / (n-1)!`.
pub fn impulse_equal_poles(b: &Polynomial, sigma: f64, n: usize, t: f64) -> Result<f64> {
    let q = build_q(b, sigma, n)?;
    let m = b.deg();
    let k = n - 1 - m;
    let ln_fact: f64 = (2..n).map(|j| (j as f64).ln()).sum();
    if t == 0.0 {
        return Ok(if k == 0 {
            q.eval(0.0) * (-ln_fact).exp()
        } else {
            0.0
        });
    }
    let log_mag = sigma * t + k as f64 * t.ln() - ln_fact;
    Ok(log_mag.exp() * q.eval(t))
}

/// Controllable companion realization in the time scale `tau = w0 t`.
struct Companion {
    /// Denominator coefficients `a_0..a_{n-1}` of the monic scaled denominator, ascending.
    a: Vec<f64>,
    /// Output weights on the states, ascending.
    c: Vec<f64>,
    d: f64,
    w0: f64,
}

impl Companion {
    fn new(cl: &ClosedLoop) -> Companion {
        let n = cl.n();
        let w0 = root_scale(&cl.den);
        // D(w0 s) / w0^n stays monic; w0 is a power of two so this is exact
        let wn = w0.powi(n as i32);
        let den = cl.den.scale_variable(w0).scale(1.0 / wn);
        let num = cl.num.scale_variable(w0).scale(1.0 / wn);
        let d = if num.degree() == Some(n) {
            num.leading()
        } else {
            0.0
        };
        let a = den.ascending();
        let na = num.ascending();
        let c = (0..n)
            .map(|k| na.get(k).copied().unwrap_or(0.0) - d * a[k])
            .collect();
        Companion {
            a: a[..n].to_vec(),
            c,
            d,
            w0,
        }
    }

    fn deriv(&self, x: &[f64], u: f64, out: &mut [f64]) {
        let n = x.len();
        out[..n - 1].copy_from_slice(&x[1..]);
        out[n - 1] = u - self.a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>();
    }

    fn output(&self, x: &[f64], u: f64) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum::<f64>() + self.d * u
    }

    /// Classical RK4 with constant input; returns outputs at every step.
    fn integrate(&self, mut x: Vec<f64>, u: f64, h: f64, steps: usize) -> Vec<f64> {
        let n = x.len();
        let mut out = Vec::with_capacity(steps + 1);
        out.push(self.output(&x, u));
        let (mut k1, mut k2, mut k3, mut k4) =
            (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut tmp = vec![0.0; n];
        for _ in 0..steps {
            self.deriv(&x, u, &mut k1);
            for i in 0..n {
                tmp[i] = x[i] + 0.5 * h * k1[i];
            }
            self.deriv(&tmp, u, &mut k2);
            for i in 0..n {
                tmp[i] = x[i] + 0.5 * h * k2[i];
            }
            self.deriv(&tmp, u, &mut k3);
            for i in 0..n {
                tmp[i] = x[i] + h * k3[i];
            }
            self.deriv(&tmp, u, &mut k4);
            for i in 0..n {
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            out.push(self.output(&x, u));
        }
        out
    }
}

fn check_stable(cl: &ClosedLoop) -> Result<()> {
    if roots_stable(&cl.poles) {
        Ok(())
    } else {
        Err(Error::DegenerateInput(format!(
            "closed loop is unstable (abscissa {})",
            cl.poles.abscissa()
        )))
    }
}

fn sample_times(dt: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| k as f64 * dt).collect()
}

/// Unit-step response from rest, by fixed-step RK4.
pub fn simulate_step(cl: &ClosedLoop, opts: &SimOptions) -> Result<ResponseTrace> {
    check_stable(cl)?;
    let (_, dt, steps) = opts.resolve(cl)?;
    let times = sample_times(dt, steps);
    let values = if cl.n() == 0 {
        vec![cl.num.constant_term(); steps + 1]
    } else {
        let sys = Companion::new(cl);
        sys.integrate(vec![0.0; cl.n()], 1.0, sys.w0 * dt, steps)
    };
    Ok(ResponseTrace {
        times,
        values,
        kind: ResponseKind::Step,
    })
}

/// Impulse response of a strictly proper loop, by fixed-step RK4.
pub fn simulate_impulse(cl: &ClosedLoop, opts: &SimOptions) -> Result<ResponseTrace> {
    check_stable(cl)?;
    if cl.num.degree().is_some_and(|m| m >= cl.n()) {
        return Err(Error::DegenerateInput(
            "impulse response of a biproper loop contains a Dirac term".into(),
        ));
    }
    let (_, dt, steps) = opts.resolve(cl)?;
    let times = sample_times(dt, steps);
    let n = cl.n();
    let sys = Companion::new(cl);
    let mut x0 = vec![0.0; n];
    x0[n - 1] = 1.0;
    let values = sys
        .integrate(x0, 0.0, sys.w0 * dt, steps)
        .into_iter()
        .map(|y| y * sys.w0)
        .collect();
    Ok(ResponseTrace {
        times,
        values,
        kind: ResponseKind::Impulse,
    })
}

/// True iff no sample falls below its predecessor by more than
/// `TAU_MONO * |final value|`.
pub fn is_monotone(tr: &ResponseTrace) -> Result<bool> {
    if tr.kind != ResponseKind::Step {
        return Err(Error::DegenerateInput(
            "monotonicity is defined for step traces".into(),
        ));
    }
    let tol = TAU_MONO * tr.final_value().abs();
    Ok(tr.values.windows(2).all(|w| w[1] - w[0] >= -tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::dc_gain;
    use crate::polycore::{from_roots, RootSet};

    fn cl(num: &[f64], den: &[f64]) -> ClosedLoop {
        ClosedLoop::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec())).unwrap()
    }

    #[test]
    fn closed_form_impulse_examples() {
        let one = Polynomial::one();
        let h = impulse_equal_poles(&one, -1.0, 1, 0.5).unwrap();
        assert!((h - (-0.5f64).exp()).abs() < 1e-15);
        let h = impulse_equal_poles(&one, -1.0, 2, 1.0).unwrap();
        assert!((h - (-1.0f64).exp()).abs() < 1e-15);
        let h = impulse_equal_poles(&Polynomial::new(vec![1.0, 2.0]), -1.0, 2, 1.0).unwrap();
        assert!((h - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(impulse_equal_poles(&one, -1.0, 3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn first_order_step() {
        let sys = cl(&[1.0], &[1.0, 1.0]);
        let tr = simulate_step(
            &sys,
            &SimOptions {
                t_end: Some(5.0),
                dt: None,
            },
        )
        .unwrap();
        assert_eq!(tr.kind, ResponseKind::Step);
        assert!((tr.times.last().unwrap() - 5.0).abs() < 1e-12);
        for (t, y) in tr.times.iter().zip(&tr.values) {
            assert!((y - (1.0 - (-t).exp())).abs() < 1e-6);
        }
        assert!(is_monotone(&tr).unwrap());
    }

    #[test]
    fn step_final_value_is_dc_gain() {
        let num = Polynomial::new(vec![6.0, -12.0, 12.0]);
        let den = from_roots(&RootSet::from_real(&[-1.0, -2.0, -3.0]), 1.0);
        let sys = ClosedLoop::new(num, den).unwrap();
        let tr = simulate_step(&sys, &SimOptions::default()).unwrap();
        assert!((tr.final_value() - dc_gain(&sys).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn underdamped_is_not_monotone() {
        let sys = cl(&[26.0], &[1.0, 2.0, 26.0]);
        let tr = simulate_step(&sys, &SimOptions::default()).unwrap();
        assert!(!is_monotone(&tr).unwrap());
        let flat = ResponseTrace {
            times: vec![0.0, 1.0],
            values: vec![2.0, 2.0],
            kind: ResponseKind::Step,
        };
        assert!(is_monotone(&flat).unwrap());
        let imp = ResponseTrace {
            kind: ResponseKind::Impulse,
            ..flat
        };
        assert!(is_monotone(&imp).is_err());
    }

    #[test]
    fn simulated_impulse_matches_closed_form() {
        let b = Polynomial::new(vec![3.0, 1.0, 5.0]);
        let sigma = -1.7;
        let n = 5;
        let sys =
            ClosedLoop::new(b.clone(), from_roots(&RootSet::repeated(sigma, n), 1.0)).unwrap();
        let tr = simulate_impulse(&sys, &SimOptions::default()).unwrap();
        let peak = tr.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (t, y) in tr.times.iter().zip(&tr.values) {
            let h = impulse_equal_poles(&b, sigma, n, *t).unwrap();
            assert!((y - h).abs() <= 1e-5 * peak, "t = {t}: {y} vs {h}");
        }
    }

    #[test]
    fn biproper_and_unstable_are_refused() {
        let bip = cl(&[1.0, 3.0], &[1.0, 1.0]);
        assert!(simulate_impulse(&bip, &SimOptions::default()).is_err());
        let tr = simulate_step(&bip, &SimOptions::default()).unwrap();
        assert_eq!(tr.values[0], 1.0);
        assert!((tr.final_value() - 3.0).abs() < 1e-9);
        let unstable = cl(&[1.0], &[1.0, -1.0]);
        assert!(simulate_step(&unstable, &SimOptions::default()).is_err());
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let tr = ResponseTrace {
            times: vec![0.0, 0.1],
            values: vec![1.0 / 3.0, 2.0],
            kind: ResponseKind::Step,
        };
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,y"));
        let row: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(row, vec![0.0, 1.0 / 3.0]);
    }
}
