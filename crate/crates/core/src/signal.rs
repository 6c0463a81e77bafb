//! Symbol-level RA-NOMA transmit and receive model.
//!
//! Each RF chain `i` carries only its first symbol `s_i1`; the phase shifter
//! applies `w_i = [1, e^{jΔθ_i2}, …]` so that beam `k` radiates `s_ik`. Each
//! beam then carries the superposition `Σ_i √(α p_i) s_ik`. Beams do not
//! interfere with each other, so a receiver sees only the other groups in
//! its own beam, and SIC strips the weaker (lower-index) groups.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Deployment;

const UNIT_TOL: f64 = 1e-12;

/// PSK symbols of one RAMA group, one per beam.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSymbols {
    group: usize,
    symbols: Vec<Complex64>,
}

impl GroupSymbols {
    pub fn new(group: usize, symbols: Vec<Complex64>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::invalid("group needs at least one symbol"));
        }
        for (k, s) in symbols.iter().enumerate() {
            let m = s.norm();
            if !m.is_finite() {
                return Err(Error::invalid(format!("symbol {k} is not finite")));
            }
            if m == 0.0 {
                return Err(Error::invalid(format!("symbol {k} has zero magnitude")));
            }
            if (m - 1.0).abs() > UNIT_TOL {
                return Err(Error::invalid(format!(
                    "symbol {k} has modulus {m}, PSK symbols must be unit modulus"
                )));
            }
        }
        Ok(Self { group, symbols })
    }

    /// `M`-PSK points `exp(j 2π m / M)` for the given constellation indices.
    pub fn psk(group: usize, order: usize, indices: &[usize]) -> Result<Self> {
        if order < 2 {
            return Err(Error::invalid(format!(
                "PSK order must be at least 2, got {order}"
            )));
        }
        let symbols = indices.iter().map(|&m| psk_point(order, m)).collect();
        Self::new(group, symbols)
    }

    /// Independent uniform `M`-PSK symbols, one per beam.
    pub fn random_psk<R: Rng + ?Sized>(
        group: usize,
        n_b: usize,
        order: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let indices: Vec<usize> = (0..n_b)
            .map(|_| rng.random_range(0..order.max(1)))
            .collect();
        Self::psk(group, order, &indices)
    }

    pub fn group(&self) -> usize {
        self.group
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }
}

fn psk_point(order: usize, m: usize) -> Complex64 {
    let phase = 2.0 * PI * (m % order) as f64 / order as f64;
    Complex64::new(phase.cos(), phase.sin())
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    PI - (PI - x).rem_euclid(2.0 * PI)
}

/// Phase-shifter weights of one RF chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    pub group: usize,
    /// `Δθ_ik` for beams `k = 2..n_b`, in `(-π, π]`.
    pub offsets: Vec<f64>,
    pub w: Vec<Complex64>,
}

impl PhaseVector {
    /// Signals fed to the beams when the RF chain carries `s1`.
    pub fn apply(&self, s1: Complex64) -> Vec<Complex64> {
        self.w.iter().map(|w| w * s1).collect()
    }
}

/// Phase-detector output: offsets of every beam's symbol relative to the first.
pub fn phase_offsets(sym: &GroupSymbols) -> Result<PhaseVector> {
    let first = sym.symbols[0];
    if first.norm() == 0.0 {
        return Err(Error::invalid("reference symbol has zero magnitude"));
    }
    let base = first.arg();
    let mut offsets = Vec::with_capacity(sym.symbols.len() - 1);
    let mut w = Vec::with_capacity(sym.symbols.len());
    w.push(Complex64::new(1.0, 0.0));
    for s in &sym.symbols[1..] {
        if s.norm() == 0.0 {
            return Err(Error::invalid("symbol has zero magnitude"));
        }
        let d = wrap_phase(s.arg() - base);
        offsets.push(d);
        w.push(Complex64::from_polar(1.0, d));
    }
    Ok(PhaseVector {
        group: sym.group,
        offsets,
        w,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamComposite {
    pub beam: usize,
    /// `√(α p_i) s_ik` for each group `i`.
    pub terms: Vec<Complex64>,
    pub composite: Complex64,
}

/// Superposition-coded signal of every beam.
pub fn beam_superposition(
    symbols_per_group: &[GroupSymbols],
    powers: &[f64],
    alpha: f64,
) -> Result<Vec<BeamComposite>> {
    if symbols_per_group.len() != powers.len() {
        return Err(Error::invalid(format!(
            "{} symbol groups but {} powers",
            symbols_per_group.len(),
            powers.len()
        )));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    check_powers(powers)?;
    let Some(first) = symbols_per_group.first() else {
        return Ok(Vec::new());
    };
    let n_b = first.symbols.len();
    if symbols_per_group.iter().any(|g| g.symbols.len() != n_b) {
        return Err(Error::invalid("all groups must carry one symbol per beam"));
    }

    let amplitudes: Vec<f64> = powers.iter().map(|p| (alpha * p).sqrt()).collect();
    Ok((0..n_b)
        .map(|k| {
            let terms: Vec<Complex64> = symbols_per_group
                .iter()
                .zip(&amplitudes)
                .map(|(g, a)| g.symbols[k] * *a)
                .collect();
            let composite = terms.iter().sum();
            BeamComposite {
                beam: k,
                terms,
                composite,
            }
        })
        .collect())
}

/// Average `|composite|²` over `draws` independent uniform `M`-PSK symbol draws
/// and all beams. Tends to `α Σ p_i`.
pub fn composite_power_monte_carlo(
    powers: &[f64],
    alpha: f64,
    n_b: usize,
    psk_order: usize,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    if draws == 0 || n_b == 0 {
        return Err(Error::invalid("need at least one draw and one beam"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..draws {
        let groups = (0..powers.len())
            .map(|i| GroupSymbols::random_psk(i, n_b, psk_order, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        acc += beam_superposition(&groups, powers, alpha)?
            .iter()
            .map(|b| b.composite.norm_sqr())
            .sum::<f64>();
    }
    Ok(acc / (draws * n_b) as f64)
}

/// Power terms of the signal received by user `(i, k)` before SIC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceivedDecomposition {
    pub intended_power: f64,
    pub intra_beam_interference_power: f64,
    pub noise_var: f64,
}

fn check_powers(p: &[f64]) -> Result<()> {
    if let Some(bad) = p.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(Error::invalid(format!(
            "powers must be finite and nonnegative, got {bad}"
        )));
    }
    Ok(())
}

fn received_term_powers(
    k: usize,
    p: &[f64],
    alpha: f64,
    dep: &Deployment,
    group: usize,
) -> Result<Vec<f64>> {
    dep.check_indices(group, k)?;
    if p.len() != dep.n_rf() {
        return Err(Error::invalid(format!(
            "power vector has {} entries, deployment has {} groups",
            p.len(),
            dep.n_rf()
        )));
    }
    check_powers(p)?;
    // Every component of beam k reaches user (group, k) through the same channel.
    let h_sq = dep.gain_sq(group, k);
    Ok(p.iter().map(|pl| alpha * pl * h_sq).collect())
}

pub fn decompose_received(
    i: usize,
    k: usize,
    p: &[f64],
    alpha: f64,
    dep: &Deployment,
) -> Result<ReceivedDecomposition> {
    let terms = received_term_powers(k, p, alpha, dep, i)?;
    let interference = terms
        .iter()
        .enumerate()
        .filter(|(l, _)| *l != i)
        .map(|(_, t)| t)
        .sum();
    Ok(ReceivedDecomposition {
        intended_power: terms[i],
        intra_beam_interference_power: interference,
        noise_var: dep.noise_var(),
    })
}

/// SINR of user `(i, k)` after SIC has removed groups `0..i`.
pub fn post_sic_sinr(i: usize, k: usize, p: &[f64], alpha: f64, dep: &Deployment) -> Result<f64> {
    let terms = received_term_powers(k, p, alpha, dep, i)?;
    let residual: f64 = terms[i + 1..].iter().sum();
    Ok(terms[i] / (residual + dep.noise_var()))
}
