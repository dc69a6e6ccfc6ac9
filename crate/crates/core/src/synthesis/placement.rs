use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lti::Plant;
use crate::polycore::{from_roots, root_scale, Polynomial, RootSet};

/// Placement systems with an equilibrated condition estimate above this are refused.
pub const COND_LIMIT: f64 = 1e12;

/// Largest accepted componentwise backward error of the placement solve.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

const RUIZ_SWEEPS: usize = 12;
const REFINE_STEPS: usize = 3;

/// `M [f; g] = a` for a plant and a controller order.
#[derive(Clone, Debug, PartialEq)]
pub struct PlacementSystem {
    pub m: DMatrix<f64>,
    pub n_o: usize,
    pub n_c: usize,
}

/// Outcome of a placement solve.
#[derive(Clone, Debug, PartialEq)]
pub struct Placement {
    pub f: Polynomial,
    pub g: Polynomial,
    /// `max_i |M x - a|_i / (|M| |x| + |a|)_i`.
    pub residual: f64,
    /// Condition estimate of the equilibrated matrix.
    pub condition: f64,
}

/// Monic `prod (s - p_i)`.
pub fn char_poly(poles: &RootSet) -> Polynomial {
    from_roots(poles, 1.0)
}

/// The banded matrix with shifted copies of the numerator coefficients in
/// the first `n_c + 1` columns and of the denominator coefficients in the rest.
pub fn build_m(plant: &Plant, n_c: usize) -> PlacementSystem {
    let n_o = plant.n_o();
    let rows = n_o + n_c + 1;
    let cols = 2 * (n_c + 1);
    // numerator padded to degree n_o: b[0] multiplies s^n_o
    let b: Vec<f64> = (0..=n_o).map(|i| plant.num().coeff(n_o - i)).collect();
    let a = plant.den().coeffs();
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..=n_c {
        for k in 0..=n_o {
            m[(j + k, j)] = b[k];
            m[(j + k, n_c + 1 + j)] = a[k];
        }
    }
    PlacementSystem { m, n_o, n_c }
}

fn pow2(x: f64) -> f64 {
    if x > 0.0 && x.is_finite() {
        2f64.powi(x.log2().round() as i32)
    } else {
        1.0
    }
}

/// Ruiz equilibration in powers of two, starting from the scaling `(r, c)`:
/// `diag(r) M diag(c)` ends with rows and columns of max-norm near one.
fn equilibrate(m: &DMatrix<f64>, r: &mut DVector<f64>, c: &mut DVector<f64>) {
    let (rows, cols) = m.shape();
    for _ in 0..RUIZ_SWEEPS {
        for i in 0..rows {
            let mx = (0..cols).fold(0.0f64, |acc, j| acc.max((m[(i, j)] * r[i] * c[j]).abs()));
            r[i] /= pow2(mx.sqrt());
        }
        for j in 0..cols {
            let mx = (0..rows).fold(0.0f64, |acc, i| acc.max((m[(i, j)] * r[i] * c[j]).abs()));
            c[j] /= pow2(mx.sqrt());
        }
    }
}

fn scaled(m: &DMatrix<f64>, r: &DVector<f64>, c: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * r[i] * c[j])
}

fn backward_error(m: &DMatrix<f64>, x: &DVector<f64>, a: &DVector<f64>) -> f64 {
    let r = a - m * x;
    let denom = m.abs() * x.abs() + a.abs();
    r.iter()
        .zip(denom.iter())
        .map(|(ri, di)| if *di == 0.0 { ri.abs() } else { ri.abs() / di })
        .fold(0.0, f64::max)
}

/// Solver for `M x = b` working on the scaled matrix `diag(r) M diag(c)`.
struct ScaledSolver {
    r: DVector<f64>,
    c: DVector<f64>,
    /// Right singular vectors of the scaled matrix, padded to square.
    v: DMatrix<f64>,
    sv: Vec<f64>,
    u: DMatrix<f64>,
    rows: usize,
    /// Orthonormal null-space basis in original coordinates.
    null: Option<DMatrix<f64>>,
}

impl ScaledSolver {
    fn new(m: &DMatrix<f64>, w: f64) -> ScaledSolver {
        let (rows, cols) = m.shape();
        // s = w * s_hat maps row i by w^-i and column j of either block by w^j
        let nc1 = cols / 2;
        let mut r = DVector::from_fn(rows, |i, _| w.powi(-(i as i32)));
        let mut c = DVector::from_fn(cols, |j, _| w.powi((j % nc1) as i32));
        equilibrate(m, &mut r, &mut c);
        let mut padded = DMatrix::zeros(cols, cols);
        padded.rows_mut(0, rows).copy_from(&scaled(m, &r, &c));
        let svd = padded.svd(true, true);
        let mut order: Vec<usize> = (0..cols).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let u_full = svd.u.expect("left singular vectors");
        let v_full = svd.v_t.expect("right singular vectors").transpose();
        let sv: Vec<f64> = order[..rows]
            .iter()
            .map(|&k| svd.singular_values[k])
            .collect();
        let u = DMatrix::from_fn(rows, rows, |i, k| u_full[(i, order[k])]);
        let v = DMatrix::from_fn(cols, rows, |i, k| v_full[(i, order[k])]);
        let null = (cols > rows).then(|| {
            let basis = DMatrix::from_fn(cols, cols - rows, |i, k| {
                c[i] * v_full[(i, order[rows + k])]
            });
            basis.qr().q()
        });
        ScaledSolver {
            r,
            c,
            v,
            sv,
            u,
            rows,
            null,
        }
    }

    fn condition(&self) -> f64 {
        let smin = self.sv[self.rows - 1];
        if smin > 0.0 {
            self.sv[0] / smin
        } else {
            f64::INFINITY
        }
    }

    /// A solution of `M x = b`, projected to minimum norm when `M` is wide.
    fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let bs = b.component_mul(&self.r);
        let mut y = self.u.transpose() * bs;
        for (yi, s) in y.iter_mut().zip(&self.sv) {
            *yi /= s;
        }
        let x = (&self.v * y).component_mul(&self.c);
        match &self.null {
            Some(q) => &x - q * (q.transpose() * &x),
            None => x,
        }
    }
}

/// Solves `M [f; g] = a` for the characteristic polynomial of `poles`.
///
/// With `n_c = n_o - 1` the system is square; otherwise the solution of
/// minimum Euclidean norm is returned.
pub fn place_poles(plant: &Plant, poles: &RootSet, n_c: usize) -> Result<Placement> {
    let n_o = plant.n_o();
    if n_c + 1 < n_o {
        return Err(Error::OrderConstraint(format!(
            "n_c = {n_c} is below n_o - 1 = {}",
            n_o - 1
        )));
    }
    if poles.count() != n_o + n_c {
        return Err(Error::DegenerateInput(format!(
            "{} poles requested, n_o + n_c = {}",
            poles.count(),
            n_o + n_c
        )));
    }
    let sys = build_m(plant, n_c);
    let m = &sys.m;
    let a = DVector::from_column_slice(char_poly(poles).coeffs());
    let w = pow2((root_scale(plant.num()) * root_scale(plant.den())).sqrt());
    let solver = ScaledSolver::new(m, w);
    let condition = solver.condition();
    if condition.is_nan() || condition > COND_LIMIT {
        return Err(Error::RankDeficient { condition });
    }
    let mut x = solver.solve(&a);
    for _ in 0..REFINE_STEPS {
        let res = &a - m * &x;
        x += solver.solve(&res);
    }
    let residual = backward_error(m, &x, &a);
    if residual.is_nan() || residual > RESIDUAL_LIMIT {
        return Err(Error::ResidualTooLarge { residual });
    }
    let f = Polynomial::new(x.rows(0, n_c + 1).iter().copied().collect::<Vec<_>>());
    let g = Polynomial::new(x.rows(n_c + 1, n_c + 1).iter().copied().collect::<Vec<_>>());
    Ok(Placement {
        f,
        g,
        residual,
        condition,
    })
}

/// Static gain giving unit dc gain: `(B_o(0) F(0) + A_o(0) G(0)) / B_o(0)`.
pub fn design_kc(plant: &Plant, f: &Polynomial, g: &Polynomial) -> Result<f64> {
    let b0 = plant.num().constant_term();
    if b0 == 0.0 {
        return Err(Error::DegenerateInput(
            "plant has a zero at the origin".into(),
        ));
    }
    Ok((b0 * f.constant_term() + plant.den().constant_term() * g.constant_term()) / b0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::{close_loop, dc_gain, Controller};

    fn plant(num: &[f64], den: &[f64]) -> Plant {
        Plant::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec())).unwrap()
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(
            char_poly(&RootSet::repeated(-1.0, 2)).coeffs(),
            &[1.0, 2.0, 1.0]
        );
        assert_eq!(
            char_poly(&RootSet::repeated(-2.0, 3)).coeffs(),
            &[1.0, 6.0, 12.0, 8.0]
        );
        let mut p = RootSet::new();
        p.push_pair(-1.0, 1.0, 1);
        assert_eq!(char_poly(&p).coeffs(), &[1.0, 2.0, 2.0]);
    }

    #[test]
    fn build_m_examples() {
        let s = build_m(&plant(&[1.0, 2.0], &[1.0, 3.0]), 0);
        assert_eq!(s.m, DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 3.0]));
        let s = build_m(&plant(&[1.0], &[1.0, 1.0]), 0);
        assert_eq!(s.m, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 1.0]));
        let s = build_m(&plant(&[1.0, 2.0], &[1.0, 3.0, 5.0, 7.0]), 4);
        assert_eq!(s.m.shape(), (3 + 4 + 1, 2 * 5));
    }

    #[test]
    fn square_placement_examples() {
        let p = plant(&[1.0, 2.0], &[1.0, 3.0]);
        let pl = place_poles(&p, &RootSet::from_real(&[-1.0]), 0).unwrap();
        assert!((pl.f.coeff(0) - 2.0).abs() < 1e-14);
        assert!((pl.g.coeff(0) + 1.0).abs() < 1e-14);
        let kc = design_kc(&p, &pl.f, &pl.g).unwrap();
        assert!((kc - 0.5).abs() < 1e-14);

        let p = plant(&[1.0], &[1.0, 1.0]);
        let pl = place_poles(&p, &RootSet::from_real(&[-5.0]), 0).unwrap();
        assert!((pl.f.coeff(0) - 4.0).abs() < 1e-14);
        assert!((pl.g.coeff(0) - 1.0).abs() < 1e-14);
        let kc = design_kc(&p, &pl.f, &pl.g).unwrap();
        assert!((kc - 5.0).abs() < 1e-14);
        let cl = close_loop(&p, &Controller::new(pl.f, pl.g, kc).unwrap()).unwrap();
        assert!((dc_gain(&cl).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn underdetermined_is_minimum_norm() {
        let p = plant(&[1.0, 3.0], &[1.0, 2.0, 5.0]);
        let n_c = 3;
        let poles = RootSet::from_real(&[-1.0, -2.0, -3.0, -4.0, -5.0]);
        let pl = place_poles(&p, &poles, n_c).unwrap();
        assert!(pl.residual <= 1e-12);
        let m = build_m(&p, n_c).m;
        let x: DVector<f64> = DVector::from_iterator(
            8,
            (0..4)
                .map(|k| pl.f.coeff(3 - k))
                .chain((0..4).map(|k| pl.g.coeff(3 - k))),
        );
        // x lies in the row space, so every other solution x + v with M v = 0 is longer
        let mt = m.transpose();
        let gram = (&m * &mt).try_inverse().unwrap();
        let proj_null = DMatrix::identity(8, 8) - &mt * gram * &m;
        assert!((&proj_null * &x).norm() < 1e-10 * x.norm());
        for k in 0..8 {
            let v = proj_null.column(k).into_owned();
            assert!((&m * &v).norm() < 1e-10);
            assert!((&x + &v).norm() >= x.norm());
        }
    }

    #[test]
    fn common_factor_is_rank_deficient() {
        let p = plant(&[1.0, 1.0], &[1.0, 3.0, 2.0]);
        let r = place_poles(&p, &RootSet::from_real(&[-1.0, -2.0, -3.0]), 1);
        assert!(matches!(r, Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn kc_needs_nonzero_numerator_constant() {
        let p = plant(&[1.0, 0.0], &[1.0, 1.0]);
        assert!(design_kc(&p, &Polynomial::one(), &Polynomial::one()).is_err());
    }
}
