use nalgebra::{DMatrix, DVector};

use super::polynomial::{pow2_near, root_scale};
use super::Polynomial;

/// Singular values of the Sylvester matrix below this fraction of the
/// largest count as zero.
pub const GCD_RANK_TOL: f64 = 1e-10;

/// Relative backward error accepted for a gcd candidate, and below which a
/// difference in the square-free decomposition counts as zero.
const DIVIDE_TOL: f64 = 1e-10;

const REFINE_STEPS: usize = 8;

/// `(g, a, b)` with `p = g a`, `q = g b`.
type Factors = (Polynomial, Polynomial, Polynomial);

/// Monic greatest common divisor. A degree-0 result means coprime.
///
/// Both operands are balanced by a common variable scaling first, so the rank
/// threshold is insensitive to the units of `s`.
/// Returns the zero polynomial when both inputs are zero.
pub fn poly_gcd(p: &Polynomial, q: &Polynomial) -> Polynomial {
    match (p.is_zero(), q.is_zero()) {
        (true, true) => return Polynomial::zero(),
        (true, false) => return q.monic(),
        (false, true) => return p.monic(),
        _ => {}
    }
    if p.deg() == 0 || q.deg() == 0 {
        return Polynomial::one();
    }
    let rho = pow2_near((root_scale(p) * root_scale(q)).sqrt());
    let a = p.scale_variable(rho).normalized();
    let b = q.scale_variable(rho).normalized();
    balanced_gcd(&a, &b).scale_variable(1.0 / rho).monic()
}

/// Block Toeplitz matrix whose product with the stacked coefficient vector
/// `[u; v]` (`u` with `ku` entries, `v` with `kv`) is the coefficient vector
/// of `p u + q v`.
fn convolution_pair(p: &Polynomial, ku: usize, q: &Polynomial, kv: usize) -> DMatrix<f64> {
    let rows = (p.deg() + ku).max(q.deg() + kv);
    let mut s = DMatrix::zeros(rows, ku + kv);
    for j in 0..ku {
        for (i, c) in p.coeffs().iter().enumerate() {
            s[(i + j, j)] = *c;
        }
    }
    for j in 0..kv {
        for (i, c) in q.coeffs().iter().enumerate() {
            s[(i + j, ku + j)] = *c;
        }
    }
    s
}

/// Numerical nullity of the Sylvester matrix of two balanced operands of
/// positive degree: an upper estimate of the gcd degree.
fn gcd_degree(p: &Polynomial, q: &Polynomial) -> usize {
    let sv = convolution_pair(p, q.deg(), q, p.deg()).singular_values();
    let top = sv.max();
    sv.iter().filter(|&&x| x <= GCD_RANK_TOL * top).count()
}

/// Candidate gcd of degree `d` from the null vector of the `d`-th
/// subresultant matrix, accepted only if both operands are close to
/// multiples of it.
fn gcd_of_degree(p: &Polynomial, q: &Polynomial, d: usize) -> Option<Factors> {
    let (ku, kv) = (q.deg() - d + 1, p.deg() - d + 1);
    let svd = convolution_pair(p, ku, q, kv).svd(false, true);
    let v_t = svd.v_t?;
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?
        .0;
    let null = v_t.row(k);
    // p u + q v = 0 with u ~ q / g and v ~ -p / g
    let u = Polynomial::new(null.columns(0, ku).iter().copied().collect::<Vec<_>>());
    let v = Polynomial::new(null.columns(ku, kv).iter().copied().collect::<Vec<_>>());
    if u.degree() != Some(ku - 1) || v.degree() != Some(kv - 1) {
        return None;
    }
    let top = convolution_pair(&v, d + 1, &Polynomial::zero(), 0);
    let bottom = convolution_pair(&u, d + 1, &Polynomial::zero(), 0);
    let mut a = DMatrix::zeros(top.nrows() + bottom.nrows(), d + 1);
    a.view_mut((0, 0), top.shape()).copy_from(&top);
    a.view_mut((top.nrows(), 0), bottom.shape())
        .copy_from(&bottom);
    let rhs = DVector::from_iterator(
        p.coeffs().len() + q.coeffs().len(),
        p.coeffs()
            .iter()
            .map(|c| -c)
            .chain(q.coeffs().iter().copied()),
    );
    let h = a.svd(true, true).solve(&rhs, 0.0).ok()?;
    let g = Polynomial::new(h.iter().copied().collect::<Vec<_>>());
    if g.degree() != Some(d) {
        return None;
    }
    let ((g, a, b), err) = refine(p, q, g, -&v, u);
    // backward error: p and q lie within DIVIDE_TOL of exact multiples of g
    if err > DIVIDE_TOL || g.degree() != Some(d) {
        return None;
    }
    let lead = g.leading();
    Some((g.monic(), a.scale(lead), b.scale(lead)))
}

/// Coefficients of `g a - p` followed by those of `g b - q`.
fn factor_residual(
    p: &Polynomial,
    q: &Polynomial,
    g: &Polynomial,
    a: &Polynomial,
    b: &Polynomial,
) -> DVector<f64> {
    let pad = |x: Polynomial, len: usize| {
        let mut c = vec![0.0; len - x.coeffs().len().min(len)];
        c.extend_from_slice(x.coeffs());
        c
    };
    let (lp, lq) = (p.coeffs().len(), q.coeffs().len());
    let mut out = pad(&(g * a) - p, lp);
    out.extend(pad(&(g * b) - q, lq));
    DVector::from_vec(out)
}

/// Gauss-Newton refinement of `p = g a`, `q = g b` with the leading
/// coefficient of `g` held fixed. Returns the refined factors and the
/// relative backward error.
fn refine(
    p: &Polynomial,
    q: &Polynomial,
    mut g: Polynomial,
    mut a: Polynomial,
    mut b: Polynomial,
) -> (Factors, f64) {
    let scale = p.norm_inf().max(q.norm_inf());
    let (kg, ka, kb) = (g.coeffs().len(), a.coeffs().len(), b.coeffs().len());
    let (lp, lq) = (p.coeffs().len(), q.coeffs().len());
    let mut res = factor_residual(p, q, &g, &a, &b);
    for _ in 0..REFINE_STEPS {
        if a.coeffs().len() != ka || b.coeffs().len() != kb || g.coeffs().len() != kg {
            break;
        }
        let mut j = DMatrix::zeros(lp + lq + 1, kg + ka + kb);
        let ca = convolution_pair(&a, kg, &Polynomial::zero(), 0);
        let cb = convolution_pair(&b, kg, &Polynomial::zero(), 0);
        let cg_a = convolution_pair(&g, ka, &Polynomial::zero(), 0);
        let cg_b = convolution_pair(&g, kb, &Polynomial::zero(), 0);
        j.view_mut((0, 0), ca.shape()).copy_from(&ca);
        j.view_mut((0, kg), cg_a.shape()).copy_from(&cg_a);
        j.view_mut((lp, 0), cb.shape()).copy_from(&cb);
        j.view_mut((lp, kg + ka), cg_b.shape()).copy_from(&cg_b);
        j[(lp + lq, 0)] = 1.0;
        let mut f = DVector::zeros(lp + lq + 1);
        f.rows_mut(0, lp + lq).copy_from(&(-&res));
        let Ok(step) = j.svd(true, true).solve(&f, 0.0) else {
            break;
        };
        let shift = |x: &Polynomial, off: usize, len: usize| {
            Polynomial::new(
                x.coeffs()
                    .iter()
                    .zip(step.rows(off, len).iter())
                    .map(|(c, dc)| c + dc)
                    .collect::<Vec<_>>(),
            )
        };
        let (g2, a2, b2) = (shift(&g, 0, kg), shift(&a, kg, ka), shift(&b, kg + ka, kb));
        let res2 = factor_residual(p, q, &g2, &a2, &b2);
        if res2.amax() >= res.amax() {
            break;
        }
        (g, a, b, res) = (g2, a2, b2, res2);
    }
    ((g, a, b), res.amax() / scale)
}

/// Gcd of already balanced operands: degree from the Sylvester matrix,
/// lowered until a candidate is accepted.
pub(crate) fn balanced_gcd(p: &Polynomial, q: &Polynomial) -> Polynomial {
    gcd_cofactors(p, q).0
}

/// Monic gcd `g` with cofactors `a`, `b` such that `p = g a` and `q = g b`.
pub(crate) fn gcd_cofactors(p: &Polynomial, q: &Polynomial) -> Factors {
    if q.is_zero() {
        return (
            p.monic(),
            Polynomial::constant(p.leading()),
            Polynomial::zero(),
        );
    }
    if p.is_zero() {
        return (
            q.monic(),
            Polynomial::zero(),
            Polynomial::constant(q.leading()),
        );
    }
    if p.deg() == 0 || q.deg() == 0 {
        return (Polynomial::one(), p.clone(), q.clone());
    }
    let (a, b) = (p.normalized(), q.normalized());
    let (fa, fb) = (a.leading() / p.leading(), b.leading() / q.leading());
    let bound = gcd_degree(&a, &b).min(a.deg()).min(b.deg());
    for d in (1..=bound).rev() {
        if let Some((g, ca, cb)) = gcd_of_degree(&a, &b, d) {
            return (g, ca.scale(1.0 / fa), cb.scale(1.0 / fb));
        }
    }
    (Polynomial::one(), p.clone(), q.clone())
}

/// `x - y`, mapped to the zero polynomial when the difference is at the
/// rank-threshold level relative to the operands or to `floor`.
fn sub_or_zero(x: &Polynomial, y: &Polynomial, floor: f64) -> Polynomial {
    let r = x - y;
    if r.norm_inf() <= DIVIDE_TOL * (x.norm_inf() + y.norm_inf()).max(floor) {
        Polynomial::zero()
    } else {
        r
    }
}

/// Square-free decomposition `p = c · prod a_i^i` (Yun), on a balanced input.
///
/// Each returned factor is monic and square-free; multiplicities are
/// increasing. Falls back to `[(p, 1)]` if the numerical factors do not add
/// up to the degree of `p`.
pub(crate) fn squarefree_decomposition(p: &Polynomial) -> Vec<(Polynomial, usize)> {
    let d = p.deg();
    if p.is_zero() || d == 0 {
        return Vec::new();
    }
    let (_, mut c, w) = gcd_cofactors(p, &p.derivative(1));
    // later cofactors inherit the absolute error of the first pair
    let floor = w.norm_inf() + c.derivative(1).norm_inf();
    let mut dd = sub_or_zero(&w, &c.derivative(1), floor);
    let mut out = Vec::new();
    let mut i = 1;
    while c.deg() > 0 && i <= d {
        let (a, next_c, q) = if dd.is_zero() {
            (
                c.monic(),
                Polynomial::constant(c.leading()),
                Polynomial::zero(),
            )
        } else {
            gcd_cofactors(&c, &dd)
        };
        c = next_c;
        dd = if q.is_zero() || c.deg() == 0 {
            Polynomial::zero()
        } else {
            sub_or_zero(&q, &c.derivative(1), floor)
        };
        if a.deg() > 0 {
            out.push((a, i));
        }
        i += 1;
    }
    let total: usize = out.iter().map(|(a, m)| a.deg() * m).sum();
    if total != d {
        return vec![(p.monic(), 1)];
    }
    out
}

/// The square-free part `p / gcd(p, p')` of a balanced polynomial.
pub(crate) fn squarefree_part(p: &Polynomial) -> Polynomial {
    if p.deg() == 0 {
        return p.clone();
    }
    gcd_cofactors(p, &p.derivative(1)).1.normalized()
}
