//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input failed a precondition; `field` names the offending quantity.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    /// A filament state does not close into a loop.
    #[error("closure constraint violated: tangent integral residual ({0:.3e}, {1:.3e}, {2:.3e})")]
    ClosureViolation(f64, f64, f64),

    /// The sampling grid cannot represent the stored modes without aliasing.
    #[error("grid too small for mode content: need N >= {required} for |n| <= {n_max}, got {got}")]
    Aliasing {
        required: usize,
        got: usize,
        n_max: i32,
    },

    /// Explicit time stepping would be unstable at the requested step.
    #[error("time step {dt:.6e} exceeds the stability bound {bound:.6e}")]
    UnstableTimeStep { dt: f64, bound: f64 },

    #[error("mask is not connected: found {components} components")]
    DisconnectedMask { components: usize },

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {residual:.3e})")]
    EigenConvergence { iterations: usize, residual: f64 },

    /// A run aborted mid-flight; partial output is preserved.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The supplied eigenvalue table stops before the admissibility threshold.
    #[error(
        "eigenvalue table incomplete: largest provided lambda = {have:.6e} (m = {m_have}) \
         does not exceed the cutoff pi*n_max/L = {need:.6e}; extend the table"
    )]
    IncompleteEigenTable { have: f64, m_have: usize, need: f64 },

    #[error("{0}")]
    Unsupported(String),

    /// Configuration rejected; one entry per bad field.
    #[error("configuration invalid:\n{}", .0.join("\n"))]
    ConfigInvalid(Vec<String>),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code a CLI front end should use for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. }
            | Error::ConfigInvalid(_)
            | Error::ConfigParse(_)
            | Error::Aliasing { .. }
            | Error::ClosureViolation(..)
            | Error::Unsupported(_)
            | Error::DisconnectedMask { .. }
            | Error::IncompleteEigenTable { .. } => 2,
            Error::UnstableTimeStep { .. }
            | Error::EigenConvergence { .. }
            | Error::Numerical(_) => 3,
            Error::Io(_) => 1,
        }
    }
}
