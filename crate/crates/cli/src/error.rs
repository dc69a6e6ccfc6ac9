use thiserror::Error;

use monotrack_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {msg}")]
    Io { path: String, msg: String },

    #[error("closed loop is unstable (pole abscissa {abscissa})")]
    Unstable { abscissa: f64 },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// 1 usage or input, 2 infeasible, 3 numerical.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io { .. } => 1,
            CliError::Unstable { .. } => 3,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

pub fn core_exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::InfeasiblePlant { .. }
        | CoreError::InfeasibleOrder { .. }
        | CoreError::InfeasibleDecay { .. }
        | CoreError::InfeasibleAtAlphaZero { .. } => 2,
        CoreError::DegenerateInput(_) | CoreError::OrderConstraint(_) | CoreError::Io(_) => 1,
        CoreError::ConvergenceFailure { .. }
        | CoreError::RankDeficient { .. }
        | CoreError::ResidualTooLarge { .. }
        | CoreError::InconsistentGain { .. }
        | CoreError::DecayNotRealized { .. } => 3,
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
