//! Power allocation for one RA-NOMA beam.
//!
//! Because every beam gets the same splitter share `α = 1/N_B` of each RF
//! chain, the multi-beam problem collapses to a single beam whose group `i`
//! carries the strictest rate floor of that group ([`reduce_beams`]). On that
//! beam the sum rate is concave in the tail sums `a_i = Σ_{l≥i} p_l` and all
//! constraints are linear, so:
//!
//! * [`min_power`] / [`feasibility`] give the cheapest allocation meeting
//!   every floor, by backward recursion and by its expanded closed form;
//! * [`solve_closed_form`] is the KKT solution: floors `1..N-1` tight, the
//!   budget fully spent, the leftover going to the strongest group;
//! * [`solve_numeric`] is an independent log-barrier interior-point solver
//!   used to cross-check the closed form.

mod closed_form;
mod numeric;
mod problem;
mod rate;

pub use closed_form::{feasibility, kkt_multipliers, min_power, solve_closed_form};
pub use numeric::{solve_numeric, solve_numeric_with, NumericOptions};
pub use problem::{per_user_power_bound, reduce_beams, BeamProblem};
pub use rate::{beam_rates, total_sum_rate, user_rate};

/// Relative slack below which the budget is taken to equal the minimum
/// total power (absorbs rounding between the recursion and its closed form).
pub const FEASIBILITY_RTOL: f64 = 1e-12;

/// Lagrange multipliers of the single-beam problem, in log2 units.
///
/// `gamma` prices the power budget, `betas[i]` the rate floor of group `i`
/// written as `|h_i|² a_i + σ²/α ≥ 2^{R̄_i}(|h_i|² a_{i+1} + σ²/α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub gamma: f64,
    pub betas: Vec<f64>,
    /// Every rate floor is tight, i.e. the budget equals the minimum total power.
    pub boundary_case: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    /// RF-chain powers `p_i`.
    pub powers: Vec<f64>,
    pub per_group_rates: Vec<f64>,
    pub beam_sum_rate: f64,
    pub kkt: KktReport,
}

impl AllocationResult {
    pub fn total_power(&self) -> f64 {
        self.powers.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// `‖p*‖₁`, from the closed-form expansion of the recursion.
    pub min_total_power: f64,
    pub feasible: bool,
    pub min_powers: Vec<f64>,
}

impl FeasibilityReport {
    /// Transmit SNR, in dB, at which the floors become just achievable.
    pub fn threshold_db(&self, noise_var: f64) -> f64 {
        10.0 * (self.min_total_power / noise_var).log10()
    }
}
