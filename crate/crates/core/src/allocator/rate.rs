use crate::error::{Error, Result};
use crate::model::Deployment;

use super::{AllocationResult, BeamProblem};

/// Achievable rate of user `(i, k)` in b/s/Hz, with SIC in descending order.
pub fn user_rate(i: usize, k: usize, p: &[f64], alpha: f64, dep: &Deployment) -> Result<f64> {
    dep.check_indices(i, k)?;
    if p.len() != dep.n_rf() {
        return Err(Error::invalid(format!(
            "power vector has {} entries, deployment has {} groups",
            p.len(),
            dep.n_rf()
        )));
    }
    if p.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
        return Err(Error::invalid("powers must be finite and nonnegative"));
    }
    let h = dep.gain_sq(i, k);
    let stronger: f64 = p[i + 1..].iter().map(|pl| alpha * pl).sum();
    Ok((1.0 + alpha * p[i] * h / (h * stronger + dep.noise_var())).log2())
}

/// Per-group rates on the reduced beam for power vector `p`.
pub fn beam_rates(bp: &BeamProblem, p: &[f64]) -> Vec<f64> {
    let alpha = bp.alpha();
    let mut tail = 0.0;
    let mut rates = vec![0.0; p.len()];
    for i in (0..p.len()).rev() {
        let h = bp.gains_sq()[i];
        rates[i] = (1.0 + alpha * p[i] * h / (h * alpha * tail + bp.noise_var())).log2();
        tail += p[i];
    }
    rates
}

/// Sum rate over all beams: every beam achieves the same rate.
pub fn total_sum_rate(beam_result: &AllocationResult, n_b: usize) -> f64 {
    beam_result.beam_sum_rate * n_b as f64
}
