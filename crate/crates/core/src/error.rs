use std::path::PathBuf;

use thiserror::Error;

use crate::allocator::FeasibilityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Deployment cell layout is wrong (missing or duplicated user cells).
    #[error("schema error: {0}")]
    Schema(String),

    /// A grouping invariant does not hold (beam ordering or group similarity).
    #[error("grouping error: {0}")]
    Grouping(String),

    #[error("config parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error(
        "rate floors need {:.6} total power but the budget is {p_max:.6}",
        report.min_total_power
    )]
    Infeasible {
        report: FeasibilityReport,
        p_max: f64,
    },

    #[error(
        "numeric solver failed after {iterations} Newton steps (t = {barrier_weight:e}): {reason}"
    )]
    Solver {
        iterations: usize,
        barrier_weight: f64,
        reason: String,
    },

    #[error(
        "closed-form and numeric solvers disagree at {snr_db} dB: {closed_form:.9} vs {numeric:.9}"
    )]
    SolverDisagreement {
        snr_db: f64,
        closed_form: f64,
        numeric: f64,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: msg.into(),
        }
    }
}
