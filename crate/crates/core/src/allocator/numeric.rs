//! Log-barrier interior-point solver for the single-beam problem.
//!
//! Works in the scaled tail sums `x_i = a_i / P_max`, where the objective
//! `Σ_i ln((h_i x_i + c)/(h_i x_{i+1} + c))`, `c = σ²/(α P_max)`, is concave
//! and every constraint is linear:
//!
//! * budget: `1 − x_1 ≥ 0`
//! * floor `i`: `x_i − 2^{R̄_i} x_{i+1} − (2^{R̄_i} − 1) c/h_i ≥ 0`
//!
//! For nonnegative floors the floor rows imply `p ≥ 0`, so no separate
//! nonnegativity rows are needed. The barrier iterate is finished by an
//! active-set polish: candidate active sets near the barrier point are solved
//! as equality-constrained problems and the best KKT point is kept.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::{AllocationResult, BeamProblem, FeasibilityReport, KktReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    /// Target duality gap `m / t` of the barrier path, in nats.
    pub gap_tol: f64,
    pub initial_weight: f64,
    pub weight_growth: f64,
    pub max_newton_steps: usize,
    /// Scaled slack below which a constraint is a candidate for the active set.
    pub active_slack: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            initial_weight: 1.0,
            weight_growth: 10.0,
            max_newton_steps: 1000,
            active_slack: 1e-3,
        }
    }
}

pub fn solve_numeric(bp: &BeamProblem) -> Result<AllocationResult> {
    solve_numeric_with(bp, &NumericOptions::default())
}

/// Linear constraints `G x − d ≥ 0`; row 0 is the budget, row `i + 1` the floor of group `i`.
struct Problem {
    n: usize,
    gains: Vec<f64>,
    /// `2^{R̄_i}`
    growth: Vec<f64>,
    c: f64,
    p_max: f64,
    rows: DMatrix<f64>,
    rhs: DVector<f64>,
}

impl Problem {
    fn new(bp: &BeamProblem) -> Self {
        let n = bp.n_rf();
        let p_max = bp.p_max();
        let c = bp.noise_var() / (bp.alpha() * p_max);
        let gains = bp.gains_sq().to_vec();
        let mut rows = DMatrix::zeros(n + 1, n);
        let mut rhs = DVector::zeros(n + 1);
        let growth: Vec<f64> = bp.rate_floors().iter().map(|r| r.exp2()).collect();
        rows[(0, 0)] = -1.0;
        rhs[0] = -1.0;
        for (i, &q) in growth.iter().enumerate() {
            rows[(i + 1, i)] = 1.0;
            if i + 1 < n {
                rows[(i + 1, i + 1)] = -q;
            }
            rhs[i + 1] = (q - 1.0) * c / gains[i];
        }
        Self {
            n,
            gains,
            growth,
            c,
            p_max,
            rows,
            rhs,
        }
    }

    fn m(&self) -> usize {
        self.n + 1
    }

    fn slacks(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.rows * x - &self.rhs
    }

    fn tail(x: &DVector<f64>, i: usize) -> f64 {
        x.get(i).copied().unwrap_or(0.0)
    }

    fn in_domain(&self, x: &DVector<f64>) -> bool {
        (0..self.n).all(|i| self.gains[i] * x[i] + self.c > 0.0)
            && (1..self.n).all(|i| self.gains[i - 1] * x[i] + self.c > 0.0)
    }

    fn group_rates_nats(&self, x: &DVector<f64>) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let h = self.gains[i];
                ((h * x[i] + self.c) / (h * Self::tail(x, i + 1) + self.c)).ln()
            })
            .collect()
    }

    fn objective(&self, x: &DVector<f64>) -> f64 {
        self.group_rates_nats(x).iter().sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.n, |j, _| {
            let own = self.gains[j] / (self.gains[j] * x[j] + self.c);
            let prev = if j > 0 {
                self.gains[j - 1] / (self.gains[j - 1] * x[j] + self.c)
            } else {
                0.0
            };
            own - prev
        })
    }

    /// The objective is separable in `x`, so its Hessian is diagonal.
    fn hessian_diag(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.n, |j, _| {
            let own = self.gains[j] / (self.gains[j] * x[j] + self.c);
            let prev = if j > 0 {
                self.gains[j - 1] / (self.gains[j - 1] * x[j] + self.c)
            } else {
                0.0
            };
            prev * prev - own * own
        })
    }

    /// Lowest point of the floor chain: every floor tight.
    fn floor_chain(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.n);
        for i in (0..self.n).rev() {
            x[i] = self.growth[i] * Self::tail(&x, i + 1) + self.rhs[i + 1];
        }
        x
    }
}

struct Barrier {
    x: DVector<f64>,
    weight: f64,
    steps: usize,
}

fn fail(steps: usize, weight: f64, reason: impl Into<String>) -> Error {
    Error::Solver {
        iterations: steps,
        barrier_weight: weight,
        reason: reason.into(),
    }
}

fn center(
    prob: &Problem,
    x: &mut DVector<f64>,
    weight: f64,
    steps: &mut usize,
    opts: &NumericOptions,
) -> Result<()> {
    let barrier_value = |x: &DVector<f64>| -> Option<f64> {
        let s = prob.slacks(x);
        if s.iter().any(|v| *v <= 0.0) || !prob.in_domain(x) {
            return None;
        }
        Some(-weight * prob.objective(x) - s.iter().map(|v| v.ln()).sum::<f64>())
    };

    loop {
        if *steps >= opts.max_newton_steps {
            return Err(fail(*steps, weight, "Newton step budget exhausted"));
        }
        *steps += 1;

        let s = prob.slacks(x);
        let inv_s = s.map(|v| 1.0 / v);
        let grad = -weight * prob.gradient(x) - prob.rows.transpose() * &inv_s;
        let mut hess = DMatrix::from_diagonal(&(-weight * prob.hessian_diag(x)));
        let scaled_rows = DMatrix::from_fn(prob.m(), prob.n, |j, k| prob.rows[(j, k)] * inv_s[j]);
        hess += scaled_rows.transpose() * &scaled_rows;

        let step = match hess.clone().cholesky() {
            Some(chol) => chol.solve(&(-&grad)),
            None => hess
                .lu()
                .solve(&(-&grad))
                .ok_or_else(|| fail(*steps, weight, "singular barrier Hessian"))?,
        };
        let decrement = -grad.dot(&step);
        if decrement / 2.0 <= 1e-10 {
            return Ok(());
        }

        let phi =
            barrier_value(x).ok_or_else(|| fail(*steps, weight, "iterate left the interior"))?;
        let mut eta = 1.0;
        loop {
            let trial = &*x + &step * eta;
            if trial == *x {
                return Ok(());
            }
            if let Some(v) = barrier_value(&trial) {
                if v <= phi - 0.25 * eta * decrement {
                    *x = trial;
                    break;
                }
            }
            eta *= 0.5;
            if eta < 1e-16 {
                // Rounding floor of the merit function; the iterate is centered.
                return Ok(());
            }
        }
    }
}

fn run_barrier(prob: &Problem, start: DVector<f64>, opts: &NumericOptions) -> Result<Barrier> {
    let mut x = start;
    let mut weight = opts.initial_weight;
    let mut steps = 0;
    loop {
        center(prob, &mut x, weight, &mut steps, opts)?;
        if prob.m() as f64 / weight <= opts.gap_tol {
            return Ok(Barrier { x, weight, steps });
        }
        weight *= opts.weight_growth;
    }
}

struct Candidate {
    x: DVector<f64>,
    multipliers: Vec<f64>,
    active: Vec<usize>,
    objective: f64,
}

/// Multipliers `λ_A ≥ 0` with `∇f + G_Aᵀ λ_A = 0`, if they exist.
fn active_multipliers(prob: &Problem, x: &DVector<f64>, active: &[usize]) -> Option<Vec<f64>> {
    let g = prob.gradient(x);
    if active.is_empty() {
        return (g.amax() <= 1e-12).then(Vec::new);
    }
    let ga = prob.rows.select_rows(active);
    let normal = &ga * ga.transpose();
    let lambda = normal.lu().solve(&(-(&ga * &g)))?;
    let residual = &g + ga.transpose() * &lambda;
    let scale = g.amax().max(1.0);
    if residual.amax() > 1e-9 * scale || lambda.iter().any(|l| *l < -1e-9 * scale) {
        return None;
    }
    Some(lambda.iter().map(|l| l.max(0.0)).collect())
}

fn solve_on_active_set(
    prob: &Problem,
    start: &DVector<f64>,
    active: &[usize],
) -> Option<Candidate> {
    let n = prob.n;
    let k = active.len();
    let ga = prob.rows.select_rows(active);
    let da = DVector::from_iterator(k, active.iter().map(|&j| prob.rhs[j]));

    let mut x = if k == n {
        ga.clone().lu().solve(&da)?
    } else {
        let correction = (&ga * ga.transpose()).lu().solve(&(&ga * start - &da))?;
        let mut x = start - ga.transpose() * correction;
        for _ in 0..100 {
            let mut kkt = DMatrix::zeros(n + k, n + k);
            kkt.view_mut((0, 0), (n, n))
                .copy_from(&DMatrix::from_diagonal(&prob.hessian_diag(&x)));
            kkt.view_mut((0, n), (n, k)).copy_from(&ga.transpose());
            kkt.view_mut((n, 0), (k, n)).copy_from(&ga);
            let mut rhs = DVector::zeros(n + k);
            rhs.rows_mut(0, n).copy_from(&(-prob.gradient(&x)));
            // Singular when the objective is flat along the face; the
            // multiplier check below decides whether x is already optimal.
            let Some(sol) = kkt.lu().solve(&rhs) else {
                break;
            };
            let step = sol.rows(0, n).into_owned();
            let mut eta = 1.0;
            let base = prob.objective(&x);
            let next = loop {
                let trial = &x + &step * eta;
                if prob.in_domain(&trial) && prob.objective(&trial) >= base - 1e-15 {
                    break trial;
                }
                eta *= 0.5;
                if eta < 1e-12 {
                    return None;
                }
            };
            let moved = (&next - &x).amax();
            x = next;
            if moved <= 1e-15 {
                break;
            }
        }
        x
    };
    if !prob.in_domain(&x) {
        return None;
    }
    if prob.slacks(&x).iter().any(|s| *s < -1e-12) {
        return None;
    }
    // Pin active rows exactly to their bounds for the reported powers.
    if active.contains(&0) {
        x[0] = 1.0;
    }
    let multipliers = active_multipliers(prob, &x, active)?;
    Some(Candidate {
        objective: prob.objective(&x),
        x,
        multipliers,
        active: active.to_vec(),
    })
}

fn polish(prob: &Problem, barrier: &Barrier, opts: &NumericOptions) -> Option<Candidate> {
    let slacks = prob.slacks(&barrier.x);
    let floor = prob.objective(&barrier.x) - 1e-9;
    let accept = |active: &[usize]| {
        solve_on_active_set(prob, &barrier.x, active).filter(|c| c.objective >= floor)
    };

    // Barrier multipliers are 1/(t s_j); constraints whose multiplier exceeds
    // their slack are the usual active-set guess.
    let guess: Vec<usize> = (0..prob.m())
        .filter(|&j| slacks[j] * slacks[j] * barrier.weight < 1.0)
        .collect();
    if !guess.is_empty() && guess.len() <= prob.n {
        if let Some(c) = accept(&guess) {
            return Some(c);
        }
    }

    // Otherwise try every subset of the nearly active constraints, largest
    // first. Any KKT point of a concave program is the optimum.
    let near: Vec<usize> = (0..prob.m())
        .filter(|&j| slacks[j] <= opts.active_slack)
        .collect();
    let mut masks: Vec<u32> = (1u32..(1 << near.len())).collect();
    masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    masks.into_iter().find_map(|mask| {
        let active: Vec<usize> = near
            .iter()
            .enumerate()
            .filter(|(b, _)| mask & (1 << b) != 0)
            .map(|(_, &j)| j)
            .collect();
        if active.len() > prob.n || active == guess {
            return None;
        }
        accept(&active)
    })
}

fn into_result(
    prob: &Problem,
    x: &DVector<f64>,
    active: &[usize],
    multipliers: &[f64],
) -> AllocationResult {
    let n = prob.n;
    let powers: Vec<f64> = (0..n)
        .map(|i| (prob.p_max * (x[i] - Problem::tail(x, i + 1))).max(0.0))
        .collect();
    let per_group_rates: Vec<f64> = prob.group_rates_nats(x).iter().map(|r| r / LN_2).collect();
    let beam_sum_rate = per_group_rates.iter().sum();

    let mut gamma = 0.0;
    let mut betas = vec![0.0; n];
    for (&j, &l) in active.iter().zip(multipliers) {
        if j == 0 {
            gamma = l / (prob.p_max * LN_2);
        } else {
            betas[j - 1] = l / (prob.gains[j - 1] * prob.p_max * LN_2);
        }
    }
    AllocationResult {
        powers,
        per_group_rates,
        beam_sum_rate,
        kkt: KktReport {
            gamma,
            betas,
            boundary_case: active.contains(&n),
        },
    }
}

pub fn solve_numeric_with(bp: &BeamProblem, opts: &NumericOptions) -> Result<AllocationResult> {
    let prob = Problem::new(bp);
    let n = prob.n;
    let lowest = prob.floor_chain();
    let excess = 1.0 - lowest[0];

    if excess < -1e-12 {
        let min_total_power = lowest[0] * prob.p_max;
        let min_powers = (0..n)
            .map(|i| prob.p_max * (lowest[i] - Problem::tail(&lowest, i + 1)))
            .collect();
        return Err(Error::Infeasible {
            report: FeasibilityReport {
                min_total_power,
                feasible: false,
                min_powers,
            },
            p_max: prob.p_max,
        });
    }

    if excess <= 1e-12 {
        // Single feasible point.
        let mut x = lowest;
        x[0] = 1.0;
        let active: Vec<usize> = (0..n).collect();
        let multipliers = active_multipliers(&prob, &x, &active)
            .ok_or_else(|| fail(0, 0.0, "no multipliers at the single feasible point"))?;
        let mut result = into_result(&prob, &x, &active, &multipliers);
        result.kkt.boundary_case = true;
        return Ok(result);
    }

    // Strictly interior start: every floor gets slack, half the excess stays unspent.
    let eps = excess / (2.0 * n as f64);
    let mut start = DVector::zeros(n);
    let mut prefix = vec![1.0; n];
    for i in 1..n {
        prefix[i] = prefix[i - 1] * prob.growth[i - 1];
    }
    for i in (0..n).rev() {
        start[i] =
            prob.growth[i] * Problem::tail(&start, i + 1) + prob.rhs[i + 1] + eps / prefix[i];
    }

    let barrier = run_barrier(&prob, start, opts)?;
    let cand = polish(&prob, &barrier, opts).ok_or_else(|| {
        fail(
            barrier.steps,
            barrier.weight,
            "active-set polish found no KKT point",
        )
    })?;
    Ok(into_result(&prob, &cand.x, &cand.active, &cand.multipliers))
}
