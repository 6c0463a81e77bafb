//! Channel and antenna model.
//!
//! A user's downlink channel is a single path `h · a(θ, φ)`, where `a` is the
//! planar-array response of the base station. The spherical lens in front of
//! the feed array collapses that plane wave to its magnitude `|h|`, so beyond
//! this module only channel power gains `|h|²` are needed.
//!
//! [`Deployment`] holds the `n_rf × n_b` grid of users: one RAMA group per RF
//! chain, one NOMA group per beam.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};

/// Default tolerance, in dB, for "comparable" channel gains within a RAMA group.
pub const DEFAULT_GROUP_GAIN_TOL_DB: f64 = 1.0;

/// Planar array layout used by [`array_response`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    n_ray_x: usize,
    n_ray_y: usize,
    spacing: f64,
    wavelength: f64,
}

impl ArrayGeometry {
    pub fn new(n_ray_x: usize, n_ray_y: usize, spacing: f64, wavelength: f64) -> Result<Self> {
        if n_ray_x == 0 || n_ray_y == 0 {
            return Err(Error::invalid("array needs at least one ray on each axis"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid(format!(
                "antenna spacing must be positive, got {spacing}"
            )));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::invalid(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(Self {
            n_ray_x,
            n_ray_y,
            spacing,
            wavelength,
        })
    }

    /// Half-wavelength spaced array.
    pub fn half_wavelength(n_ray_x: usize, n_ray_y: usize) -> Result<Self> {
        Self::new(n_ray_x, n_ray_y, 0.5, 1.0)
    }

    pub fn n_ray_x(&self) -> usize {
        self.n_ray_x
    }

    pub fn n_ray_y(&self) -> usize {
        self.n_ray_y
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn n_ray(&self) -> usize {
        self.n_ray_x * self.n_ray_y
    }

    /// Flat index of ray `(r, s)`: row-major, `r * n_ray_y + s`.
    pub fn flat_index(&self, r: usize, s: usize) -> usize {
        r * self.n_ray_y + s
    }
}

/// Angle of departure in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Aod {
    pub theta: f64,
    pub phi: f64,
}

impl Aod {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Self {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }
}

/// Normalized array response vector, ordered as [`ArrayGeometry::flat_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayResponse {
    entries: Vec<Complex64>,
    aod: Aod,
}

impl ArrayResponse {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn aod(&self) -> Aod {
        self.aod
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Array response `a(θ, φ)` of the base-station array.
///
/// Entry `(r, s)` is `exp(-jπψ) / √N_ray` with
/// `ψ = (2 d0 / λ)(r sinθ cosφ + s sinθ sinφ)`.
pub fn array_response(theta: f64, phi: f64, geom: &ArrayGeometry) -> Result<ArrayResponse> {
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::invalid(format!(
            "angles must be finite, got theta={theta}, phi={phi}"
        )));
    }
    let scale = 1.0 / (geom.n_ray() as f64).sqrt();
    let k = 2.0 * geom.spacing / geom.wavelength;
    let (ux, uy) = (theta.sin() * phi.cos(), theta.sin() * phi.sin());

    let mut entries = Vec::with_capacity(geom.n_ray());
    for r in 0..geom.n_ray_x {
        for s in 0..geom.n_ray_y {
            let psi = k * (r as f64 * ux + s as f64 * uy);
            entries.push(Complex64::from_polar(scale, -PI * psi));
        }
    }
    Ok(ArrayResponse {
        entries,
        aod: Aod::new(theta, phi),
    })
}

/// Lens output for the plane wave `h · a`: only the magnitude `|h|` survives.
pub fn lens_magnitude(h: Complex64, _response: &ArrayResponse) -> f64 {
    h.norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UserId(pub usize);

/// One user of the deployment. `group` and `beam` are zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSpec {
    pub user_id: UserId,
    pub group: usize,
    pub beam: usize,
    /// Linear channel power gain `|h|²`.
    pub gain_sq: f64,
    pub aod: Option<Aod>,
    /// Required rate in b/s/Hz.
    pub min_rate: f64,
}

/// Validated grid of `n_rf × n_b` users.
///
/// Invariants: exactly one user per (group, beam) cell; within each beam the
/// gains are nondecreasing in group index (the SIC decoding order); within
/// each group the gains across beams span at most `group_gain_tol_db`.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    n_rf: usize,
    n_b: usize,
    // Row-major by (group, beam).
    users: Vec<UserSpec>,
    noise_var: f64,
    group_gain_tol_db: f64,
}

impl Deployment {
    pub fn new(
        n_rf: usize,
        n_b: usize,
        users: Vec<UserSpec>,
        noise_var: f64,
        group_gain_tol_db: f64,
    ) -> Result<Self> {
        if n_rf == 0 || n_b == 0 {
            return Err(Error::Schema(format!(
                "need at least one group and one beam, got n_rf={n_rf}, n_b={n_b}"
            )));
        }
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::invalid(format!(
                "noise variance must be positive, got {noise_var}"
            )));
        }
        if !(group_gain_tol_db >= 0.0 && group_gain_tol_db.is_finite()) {
            return Err(Error::invalid(format!(
                "group gain tolerance must be nonnegative, got {group_gain_tol_db}"
            )));
        }

        let mut cells: Vec<Option<UserSpec>> = vec![None; n_rf * n_b];
        for user in users {
            if !(user.gain_sq > 0.0 && user.gain_sq.is_finite()) {
                return Err(Error::invalid(format!(
                    "user in group {}, beam {} has non-positive gain {}",
                    user.group + 1,
                    user.beam + 1,
                    user.gain_sq
                )));
            }
            if !(user.min_rate >= 0.0 && user.min_rate.is_finite()) {
                return Err(Error::invalid(format!(
                    "user in group {}, beam {} has invalid minimum rate {}",
                    user.group + 1,
                    user.beam + 1,
                    user.min_rate
                )));
            }
            if user.group >= n_rf || user.beam >= n_b {
                return Err(Error::Schema(format!(
                    "user (group {}, beam {}) outside the {n_rf}x{n_b} grid",
                    user.group + 1,
                    user.beam + 1
                )));
            }
            let slot = &mut cells[user.group * n_b + user.beam];
            if slot.is_some() {
                return Err(Error::Schema(format!(
                    "duplicate user for (group {}, beam {})",
                    user.group + 1,
                    user.beam + 1
                )));
            }
            *slot = Some(user);
        }
        let users = cells
            .into_iter()
            .enumerate()
            .map(|(idx, cell)| {
                cell.ok_or_else(|| {
                    Error::Schema(format!(
                        "missing user for (group {}, beam {})",
                        idx / n_b + 1,
                        idx % n_b + 1
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let dep = Self {
            n_rf,
            n_b,
            users,
            noise_var,
            group_gain_tol_db,
        };
        dep.check_beam_ordering()?;
        dep.check_group_similarity()?;
        Ok(dep)
    }

    fn check_beam_ordering(&self) -> Result<()> {
        for k in 0..self.n_b {
            for i in 1..self.n_rf {
                let (weaker, stronger) = (self.gain_sq(i - 1, k), self.gain_sq(i, k));
                if stronger < weaker {
                    return Err(Error::Grouping(format!(
                        "beam {}: gain of group {} ({stronger}) is below group {} ({weaker}); \
                         gains must ascend with group index",
                        k + 1,
                        i + 1,
                        i
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_group_similarity(&self) -> Result<()> {
        for i in 0..self.n_rf {
            let spread = self.group_gain_spread_db(i);
            if spread > self.group_gain_tol_db + 1e-9 {
                return Err(Error::Grouping(format!(
                    "group {}: gains across beams span {spread:.3} dB, tolerance is {} dB",
                    i + 1,
                    self.group_gain_tol_db
                )));
            }
        }
        Ok(())
    }

    /// Spread of group `i` gains across beams, in dB.
    pub fn group_gain_spread_db(&self, i: usize) -> f64 {
        let (lo, hi) = self
            .group(i)
            .map(|u| u.gain_sq)
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), g| {
                (lo.min(g), hi.max(g))
            });
        10.0 * (hi / lo).log10()
    }

    pub fn n_rf(&self) -> usize {
        self.n_rf
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// Per-beam splitter share `α = 1 / n_b`.
    pub fn alpha(&self) -> f64 {
        1.0 / self.n_b as f64
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn group_gain_tol_db(&self) -> f64 {
        self.group_gain_tol_db
    }

    pub fn users(&self) -> &[UserSpec] {
        &self.users
    }

    pub fn user(&self, group: usize, beam: usize) -> &UserSpec {
        &self.users[group * self.n_b + beam]
    }

    pub fn gain_sq(&self, group: usize, beam: usize) -> f64 {
        self.user(group, beam).gain_sq
    }

    pub fn group(&self, group: usize) -> impl Iterator<Item = &UserSpec> + '_ {
        self.users[group * self.n_b..(group + 1) * self.n_b].iter()
    }

    pub fn check_indices(&self, group: usize, beam: usize) -> Result<()> {
        if group >= self.n_rf || beam >= self.n_b {
            return Err(Error::invalid(format!(
                "(group {group}, beam {beam}) out of range for a {}x{} deployment (zero-based)",
                self.n_rf, self.n_b
            )));
        }
        Ok(())
    }
}

/// Builds and validates the deployment described by a scenario config.
///
/// Out-of-order gains are reported, never re-sorted.
pub fn build_deployment(config: &ScenarioConfig) -> Result<Deployment> {
    let users = config
        .users
        .iter()
        .enumerate()
        .map(|(idx, u)| {
            if u.group == 0 || u.beam == 0 {
                return Err(Error::Schema(format!(
                    "user #{} uses zero index; groups and beams are numbered from 1",
                    idx + 1
                )));
            }
            Ok(UserSpec {
                user_id: UserId(idx),
                group: u.group - 1,
                beam: u.beam - 1,
                gain_sq: u.gain_sq,
                aod: u.aod,
                min_rate: u.min_rate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Deployment::new(
        config.n_rf,
        config.n_b,
        users,
        config.noise_var,
        config.group_gain_tol_db,
    )
}
