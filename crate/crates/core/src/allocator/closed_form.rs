use std::f64::consts::LN_2;

use crate::error::{Error, Result};

use super::rate::beam_rates;
use super::{AllocationResult, BeamProblem, FeasibilityReport, KktReport, FEASIBILITY_RTOL};

/// Cheapest powers meeting every rate floor.
///
/// Backward recursion from the strongest group:
/// `p_i = (2^{R̄_i} − 1) (Σ_{l>i} p_l + σ²/(α|h_i|²))`.
pub fn min_power(bp: &BeamProblem) -> Vec<f64> {
    let n = bp.n_rf();
    let mut p = vec![0.0; n];
    let mut tail = 0.0;
    for i in (0..n).rev() {
        p[i] = (bp.rate_floors()[i].exp2() - 1.0) * (tail + bp.referred_noise(i));
        tail += p[i];
    }
    p
}

/// Minimum total power from the expanded form
/// `Σ_l [Π_{m<l} 2^{R̄_m}] (2^{R̄_l} − 1) σ²/(α|h_l|²)`, and the verdict against `p_max`.
pub fn feasibility(bp: &BeamProblem) -> FeasibilityReport {
    let mut total = 0.0;
    let mut growth = 1.0;
    for (l, r) in bp.rate_floors().iter().enumerate() {
        let q = r.exp2();
        total += growth * (q - 1.0) * bp.referred_noise(l);
        growth *= q;
    }
    FeasibilityReport {
        min_total_power: total,
        feasible: total <= bp.p_max() * (1.0 + FEASIBILITY_RTOL),
        min_powers: min_power(bp),
    }
}

/// Sum-rate-optimal powers for one beam.
///
/// Floors of groups `1..N-1` hold with equality and the whole budget is spent;
/// the strongest group takes what is left. When the budget equals the minimum
/// total power the feasible set is a single point and every floor is tight.
pub fn solve_closed_form(bp: &BeamProblem) -> Result<AllocationResult> {
    let report = feasibility(bp);
    if !report.feasible {
        return Err(Error::Infeasible {
            report,
            p_max: bp.p_max(),
        });
    }

    let n = bp.n_rf();
    let last = n - 1;
    let floors = bp.rate_floors();
    let q: Vec<f64> = floors.iter().map(|r| r.exp2()).collect();
    let p_max = bp.p_max();

    if p_max <= report.min_total_power * (1.0 + FEASIBILITY_RTOL) {
        let powers = report.min_powers;
        let per_group_rates = beam_rates(bp, &powers);
        let kkt = kkt_multipliers(bp, &powers, true);
        return Ok(AllocationResult {
            powers,
            per_group_rates,
            beam_sum_rate: floors.iter().sum(),
            kkt,
        });
    }

    // Tight floors give a_i = q_i a_{i+1} + (q_i − 1) σ²/(α|h_i|²); unrolling
    // to a_1 = P_max fixes p_N, then back-substitute.
    let mut growth = 1.0;
    let mut offset = 0.0;
    for (i, &qi) in q.iter().enumerate().take(last) {
        offset += growth * (qi - 1.0) * bp.referred_noise(i);
        growth *= qi;
    }
    let p_last = ((p_max - offset) / growth).max(0.0);

    let mut powers = vec![0.0; n];
    powers[last] = p_last;
    let mut tail = p_last;
    for i in (0..last).rev() {
        powers[i] = (q[i] - 1.0) * (tail + bp.referred_noise(i));
        tail += powers[i];
    }

    let h = bp.gains_sq();
    let snr_term = bp.alpha() * p_max * h[last] / (bp.noise_var() * growth);
    let mut penalty = 0.0;
    let mut tail_growth = growth;
    for i in 0..last {
        // tail_growth = Π_{l=i}^{N-1} 2^{R̄_l}
        penalty += h[last] * (q[i] - 1.0) / (h[i] * tail_growth);
        tail_growth /= q[i];
    }
    let floors_sum: f64 = floors[..last].iter().sum();
    let beam_sum_rate = (1.0 + snr_term - penalty).log2() + floors_sum;

    let per_group_rates = beam_rates(bp, &powers);
    let kkt = kkt_multipliers(bp, &powers, false);
    Ok(AllocationResult {
        powers,
        per_group_rates,
        beam_sum_rate,
        kkt,
    })
}

/// KKT multipliers at `powers`, assuming the budget is active and floors
/// `1..N-1` are tight.
///
/// Stationarity in the tail sums `a_j` gives
/// `β_{j-1} = (∂f/∂a_j + β_j |h_j|²) / (2^{R̄_{j-1}} |h_{j-1}|²)` and
/// `γ = ∂f/∂a_1 + β_1 |h_1|²`, starting from `β_N = 0`. At the boundary point
/// the multipliers are not unique; this reports the limit from the interior.
pub fn kkt_multipliers(bp: &BeamProblem, powers: &[f64], boundary_case: bool) -> KktReport {
    let n = bp.n_rf();
    let h = bp.gains_sq();
    let c = bp.noise_var() / bp.alpha();
    let mut tails = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        acc += powers[i];
        tails[i] = acc;
    }
    let slope = |j: usize| {
        let own = h[j] / (h[j] * tails[j] + c);
        let prev = if j > 0 {
            h[j - 1] / (h[j - 1] * tails[j] + c)
        } else {
            0.0
        };
        (own - prev) / LN_2
    };

    let mut betas = vec![0.0; n];
    for j in (1..n).rev() {
        let q_prev = bp.rate_floors()[j - 1].exp2();
        betas[j - 1] = (slope(j) + betas[j] * h[j]) / (q_prev * h[j - 1]);
    }
    let gamma = slope(0) + betas[0] * h[0];
    KktReport {
        gamma,
        betas,
        boundary_case,
    }
}
