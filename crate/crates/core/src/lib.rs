//! Reconfigurable-antenna NOMA (RA-NOMA) for lens-based mmWave base stations.
//!
//! Users are arranged in a grid: users on the same beam (same angle of
//! departure, different channel gains) share it through power-domain NOMA,
//! and users on different beams with comparable gains form a RAMA group fed
//! by one RF chain. The crate provides the channel and signal model, the
//! per-user SIC rate, the sum-rate-optimal power allocation (closed form and
//! an independent interior-point solver), the OMA and RAMA-OMA baselines, and
//! an SNR sweep harness with CSV output.

pub mod allocator;
pub mod baselines;
pub mod config;
pub mod error;
pub mod model;
pub mod signal;
pub mod sweep;

pub use allocator::{
    feasibility, min_power, reduce_beams, solve_closed_form, solve_numeric, total_sum_rate,
    user_rate, AllocationResult, BeamProblem, FeasibilityReport, KktReport,
};
pub use baselines::{
    oma_sum_rate, rama_oma_sum_rate, resource_accounting, ResourceAccount, Technique,
};
pub use config::{load_config, parse_config, ScenarioConfig, SolverMode};
pub use error::{Error, Result};
pub use model::{build_deployment, Deployment, UserSpec};
pub use sweep::{emit_csv, run_sweep, SweepRow};
