use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("hamiltonian is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("integrator step size underflow at t = {time}")]
    StepUnderflow { time: f64 },

    #[error("steady state is not unique ({nullity} near-zero singular values)")]
    DegenerateSteadyState { nullity: usize },

    #[error("steady-state residual {residual:.3e} exceeds tolerance")]
    SteadyStateResidual { residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("{0}")]
    Undefined(String),

    #[error("frequency grid step {step} is too coarse to resolve Γ/2 = {half_width}")]
    Resolution { step: f64, half_width: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("no feasible operating point: {constraint}")]
    Infeasible { constraint: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code: 1 configuration or I/O, 2 numerical, 3 infeasible.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParameter { .. } | Error::Io { .. } => 1,
            Error::Infeasible { .. } => 3,
            _ => 2,
        }
    }
}
