//! Monotonic tracking control for SISO LTI plants.
//!
//! Decides whether a two-parameter output-feedback controller can make the
//! closed loop stable, overshoot- and undershoot-free with unit DC gain,
//! computes the fundamental limits (minimum order, fastest decay rate) and
//! synthesizes a controller that meets them.

pub mod error;
pub mod feasibility;
pub mod limits;
pub mod lti;
pub mod polycore;
pub mod synthesis;

pub use error::{Error, Result};
pub use feasibility::{
    btilde, build_q, feasible_theorem1, feasible_with_decay, pir_equal_poles, q_coefficients,
    FeasibilityReport,
};
pub use limits::{
    corollary1_bound, limits_report, min_order, sigma_lower_bound, sigma_star,
    sigma_star_m2_closed_form, LimitsReport, MinOrder, SigmaStar,
};
pub use lti::{
    close_loop, dc_gain, impulse_equal_poles, is_monotone, is_stable, simulate_impulse,
    simulate_step, validate_order, validate_plant, ClosedLoop, Controller, ControllerStructure,
    Finding, Plant, ResponseKind, ResponseTrace, SimOptions, ValidationReport,
};
pub use polycore::{
    from_roots, isolate_real_roots, nonneg_on_halfline, poly_gcd, real_roots, sturm_count,
    ComplexPair, Polynomial, RealRoot, RootSet,
};
pub use synthesis::{
    build_m, char_poly, design_kc, place_poles, synthesize, Checks, Placement, PlacementSystem,
    SynthesisReport,
};
