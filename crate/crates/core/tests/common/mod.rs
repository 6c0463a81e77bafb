#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ranoma::model::{UserId, UserSpec};
use ranoma::{BeamProblem, Deployment};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Test-side minimum power: the backward recursion written out directly.
pub fn recursion_total(gains: &[f64], floors: &[f64], alpha: f64, noise_var: f64) -> f64 {
    let mut tail = 0.0;
    for i in (0..gains.len()).rev() {
        tail += (2f64.powf(floors[i]) - 1.0) * (tail + noise_var / (alpha * gains[i]));
    }
    tail
}

pub struct Instance {
    pub gains: Vec<f64>,
    pub floors: Vec<f64>,
    pub alpha: f64,
    pub noise_var: f64,
}

impl Instance {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let n = rng.random_range(1..=6);
        let mut gains: Vec<f64> = (0..n)
            .map(|_| 10f64.powf(rng.random_range(-20.0..0.0) / 10.0))
            .collect();
        gains.sort_by(f64::total_cmp);
        let floors = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let n_b = rng.random_range(1..=4);
        Self {
            gains,
            floors,
            alpha: 1.0 / n_b as f64,
            noise_var: rng.random_range(0.5..2.0),
        }
    }

    pub fn min_total(&self) -> f64 {
        recursion_total(&self.gains, &self.floors, self.alpha, self.noise_var)
    }

    pub fn problem(&self, p_max: f64) -> BeamProblem {
        BeamProblem::new(
            self.gains.clone(),
            self.floors.clone(),
            self.alpha,
            self.noise_var,
            p_max,
        )
        .unwrap()
    }

    /// Budget between the minimum total power and 100 times it.
    pub fn feasible_problem<R: Rng>(&self, rng: &mut R) -> BeamProblem {
        let min = self.min_total().max(1e-3);
        self.problem(min * 10f64.powf(rng.random_range(0.0..2.0)))
    }
}

/// One beam per group of `gains`, replicated over `n_b` beams with small
/// per-beam jitter (at most `jitter_db`).
pub fn jittered_deployment<R: Rng>(
    rng: &mut R,
    gains: &[f64],
    floors: &[f64],
    n_b: usize,
    jitter_db: f64,
) -> Deployment {
    let mut users = Vec::new();
    for (i, (&g, &r)) in gains.iter().zip(floors).enumerate() {
        for k in 0..n_b {
            let gain_sq = g * 10f64.powf(rng.random_range(0.0..=jitter_db) / 10.0);
            users.push(UserSpec {
                user_id: UserId(users.len()),
                group: i,
                beam: k,
                gain_sq,
                aod: None,
                min_rate: r * rng.random_range(0.5..=1.0),
            });
        }
    }
    Deployment::new(gains.len(), n_b, users, 1.0, jitter_db).unwrap()
}

pub fn reference_problem(p_max: f64) -> BeamProblem {
    BeamProblem::new(
        vec![0.1, 10f64.powf(-0.5), 1.0],
        vec![0.2; 3],
        0.25,
        1.0,
        p_max,
    )
    .unwrap()
}
