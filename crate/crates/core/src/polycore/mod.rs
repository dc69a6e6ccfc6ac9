//! Univariate real polynomials and their real-root machinery.

mod gcd;
mod polynomial;
mod roots;
mod rootset;
mod sturm;

pub use gcd::{poly_gcd, GCD_RANK_TOL};
pub use polynomial::{Polynomial, EPS_TRIM};
pub use roots::{nonneg_on_halfline, real_roots, TAU_REAL};
pub use rootset::{from_roots, ComplexPair, RealRoot, RootSet};
pub use sturm::{isolate_real_roots, sturm_count};

pub(crate) use polynomial::root_scale;
