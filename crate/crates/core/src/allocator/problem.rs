use crate::error::{Error, Result};
use crate::model::Deployment;

/// Single-beam allocation problem.
///
/// Groups are ordered weakest first; `gains_sq` is nondecreasing, which is
/// also the SIC decoding order. Ties decode in group-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamProblem {
    gains_sq: Vec<f64>,
    rate_floors: Vec<f64>,
    alpha: f64,
    noise_var: f64,
    p_max: f64,
}

impl BeamProblem {
    pub fn new(
        gains_sq: Vec<f64>,
        rate_floors: Vec<f64>,
        alpha: f64,
        noise_var: f64,
        p_max: f64,
    ) -> Result<Self> {
        if gains_sq.is_empty() {
            return Err(Error::invalid("beam problem needs at least one group"));
        }
        if gains_sq.len() != rate_floors.len() {
            return Err(Error::invalid(format!(
                "{} gains but {} rate floors",
                gains_sq.len(),
                rate_floors.len()
            )));
        }
        if gains_sq.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(Error::invalid("gains must be finite and strictly positive"));
        }
        if gains_sq.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("gains must be nondecreasing in group index"));
        }
        if rate_floors.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            return Err(Error::invalid("rate floors must be finite and nonnegative"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::invalid(format!(
                "noise variance must be positive, got {noise_var}"
            )));
        }
        if !(p_max > 0.0 && p_max.is_finite()) {
            return Err(Error::invalid(format!(
                "power budget must be positive, got {p_max}"
            )));
        }
        Ok(Self {
            gains_sq,
            rate_floors,
            alpha,
            noise_var,
            p_max,
        })
    }

    pub fn n_rf(&self) -> usize {
        self.gains_sq.len()
    }

    pub fn gains_sq(&self) -> &[f64] {
        &self.gains_sq
    }

    pub fn rate_floors(&self) -> &[f64] {
        &self.rate_floors
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    /// Same problem with a different power budget.
    pub fn with_p_max(&self, p_max: f64) -> Result<Self> {
        Self::new(
            self.gains_sq.clone(),
            self.rate_floors.clone(),
            self.alpha,
            self.noise_var,
            p_max,
        )
    }

    /// `σ² / (α |h_i|²)`: noise referred to the transmit side of group `i`.
    pub(crate) fn referred_noise(&self, i: usize) -> f64 {
        self.noise_var / (self.alpha * self.gains_sq[i])
    }
}

/// Reduces a deployment to its single-beam problem.
///
/// Each group's floor is the largest floor among its users; its effective
/// gain is the smallest gain across beams, so meeting the reduced floor meets
/// every user's floor.
pub fn reduce_beams(dep: &Deployment, p_max: f64) -> Result<BeamProblem> {
    let (gains_sq, rate_floors) = (0..dep.n_rf())
        .map(|i| {
            dep.group(i).fold((f64::INFINITY, 0.0_f64), |(g, r), u| {
                (g.min(u.gain_sq), r.max(u.min_rate))
            })
        })
        .unzip();
    BeamProblem::new(gains_sq, rate_floors, dep.alpha(), dep.noise_var(), p_max)
}

/// Lower bound on `p_i` imposed by user `(i, k)`'s own rate floor, given the
/// total power `downstream` of the stronger groups `i+1..`.
pub fn per_user_power_bound(i: usize, k: usize, downstream: f64, dep: &Deployment) -> Result<f64> {
    dep.check_indices(i, k)?;
    let u = dep.user(i, k);
    Ok((downstream + dep.noise_var() / (dep.alpha() * u.gain_sq)) * (u.min_rate.exp2() - 1.0))
}
