use thiserror::Error;

/// Errors produced by the analysis and synthesis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates a precondition (zero polynomial, improper order, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// An iterative refinement did not converge; the bracketing interval is reported.
    #[error("convergence failure: {what} (interval [{lo}, {hi}])")]
    ConvergenceFailure { what: String, lo: f64, hi: f64 },

    /// The plant has real non-negative zeros, so no controller of any order
    /// can give a monotone step response.
    #[error("infeasible plant: real non-negative zeros {offending:?}")]
    InfeasiblePlant { offending: Vec<f64> },

    /// Monotone tracking is possible for this plant, but not with `n` closed-loop poles.
    #[error("infeasible order: n = {n} closed-loop poles is too few (minimum is {n_star})")]
    InfeasibleOrder { n: usize, n_star: usize },

    /// The requested decay rate is faster than the fastest achievable one.
    #[error("infeasible decay rate: alpha = {alpha} exceeds -sigma* = {max_alpha}")]
    InfeasibleDecay { alpha: f64, max_alpha: f64 },

    /// `sigma_star` was asked for an order at which tracking is already infeasible.
    #[error("infeasible at alpha = 0 with n = {n}")]
    InfeasibleAtAlphaZero { n: usize },

    /// The controller order violates the structural constraints on `n_c`.
    #[error("controller order constraint violated: {0}")]
    OrderConstraint(String),

    /// The pole-placement matrix is singular or numerically close to it.
    #[error("rank-deficient placement system (condition estimate {condition:e})")]
    RankDeficient { condition: f64 },

    /// The placement solve did not reproduce the requested coefficients.
    #[error("placement residual {residual:e} exceeds tolerance")]
    ResidualTooLarge { residual: f64 },

    /// The synthesized loop gain `K = Kc * Ko` came out non-positive.
    #[error("internal inconsistency: closed-loop gain K = {gain} is not positive")]
    InconsistentGain { gain: f64 },

    /// Rounding in the controller coefficients moved a closed-loop pole
    /// past the requested decay rate.
    #[error("decay rate not realized: pole abscissa {abscissa} is not below -alpha = {}", -alpha)]
    DecayNotRealized { alpha: f64, abscissa: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
