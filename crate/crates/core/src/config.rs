//! Scenario files.
//!
//! Scenarios are TOML. Gains are given as `|h|²/σ²` in dB and angles of
//! departure in degrees; [`ScenarioConfig`] holds them as linear power gains
//! and radians.
//!
//! ```toml
//! n_rf = 2
//! n_b = 1
//! noise_var = 1.0            # optional, default 1
//! group_gain_tol_db = 1.0    # optional, default 1
//! techniques = ["OMA", "RAMA-OMA", "RA-NOMA"]   # optional, default all
//! solver_mode = "both"       # closed_form | numeric | both, default both
//!
//! [sweep]
//! snr_start_db = 0.0
//! snr_stop_db = 30.0
//! snr_step_db = 1.0
//!
//! [[users]]
//! group = 1                  # 1-based
//! beam = 1                   # 1-based
//! gain_db = -10.0
//! min_rate = 0.2
//! aod_deg = [30.0, 90.0]     # optional (theta, phi)
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::Technique;
use crate::error::{Error, Result};
use crate::model::{Aod, DEFAULT_GROUP_GAIN_TOL_DB};

/// Name of the bundled three-group, four-beam scenario.
pub const PAPER_FIG3: &str = "paper_fig3";

const PAPER_FIG3_TOML: &str = include_str!("../configs/paper_fig3.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMode {
    ClosedForm,
    Numeric,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrSweep {
    pub snr_start_db: f64,
    pub snr_stop_db: f64,
    pub snr_step_db: f64,
}

impl SnrSweep {
    /// Grid points `start + n·step` up to and including `stop`.
    pub fn points(&self) -> Vec<f64> {
        let count =
            ((self.snr_stop_db - self.snr_start_db) / self.snr_step_db + 1e-9).floor() as usize;
        (0..=count)
            .map(|n| self.snr_start_db + n as f64 * self.snr_step_db)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioUser {
    /// 1-based RAMA group.
    pub group: usize,
    /// 1-based beam.
    pub beam: usize,
    /// Linear `|h|²`.
    pub gain_sq: f64,
    pub min_rate: f64,
    pub aod: Option<Aod>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub n_rf: usize,
    pub n_b: usize,
    pub users: Vec<ScenarioUser>,
    pub noise_var: f64,
    pub group_gain_tol_db: f64,
    pub sweep: SnrSweep,
    pub techniques: Vec<Technique>,
    pub solver_mode: SolverMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UserEntry {
    group: usize,
    beam: usize,
    gain_db: f64,
    min_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    aod_deg: Option<[f64; 2]>,
}

fn default_noise_var() -> f64 {
    1.0
}

fn default_tol() -> f64 {
    DEFAULT_GROUP_GAIN_TOL_DB
}

fn default_techniques() -> Vec<Technique> {
    Technique::ALL.to_vec()
}

fn default_solver_mode() -> SolverMode {
    SolverMode::Both
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    n_rf: usize,
    n_b: usize,
    #[serde(default = "default_noise_var")]
    noise_var: f64,
    #[serde(default = "default_tol")]
    group_gain_tol_db: f64,
    #[serde(default = "default_techniques")]
    techniques: Vec<Technique>,
    #[serde(default = "default_solver_mode")]
    solver_mode: SolverMode,
    sweep: SnrSweep,
    users: Vec<UserEntry>,
}

impl ScenarioConfig {
    /// Parses and validates scenario text; `origin` is only used in error messages.
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| {
            let location = e
                .span()
                .map(|span| {
                    let line = text[..span.start].matches('\n').count() + 1;
                    format!("line {line}: ")
                })
                .unwrap_or_default();
            Error::Parse {
                path: origin.to_path_buf(),
                message: format!("{location}{}", e.message()),
            }
        })?;
        Self::from_file(file)
    }

    fn from_file(file: ScenarioFile) -> Result<Self> {
        if file.n_rf == 0 {
            return Err(Error::validation("n_rf", "must be at least 1"));
        }
        if file.n_b == 0 {
            return Err(Error::validation("n_b", "must be at least 1"));
        }
        if !(file.noise_var > 0.0 && file.noise_var.is_finite()) {
            return Err(Error::validation(
                "noise_var",
                "must be positive and finite",
            ));
        }
        if !(file.group_gain_tol_db >= 0.0 && file.group_gain_tol_db.is_finite()) {
            return Err(Error::validation(
                "group_gain_tol_db",
                "must be nonnegative and finite",
            ));
        }
        let sweep = file.sweep;
        if !(sweep.snr_step_db > 0.0 && sweep.snr_step_db.is_finite()) {
            return Err(Error::validation("sweep.snr_step_db", "must be positive"));
        }
        if !(sweep.snr_start_db.is_finite() && sweep.snr_stop_db.is_finite()) {
            return Err(Error::validation("sweep", "start and stop must be finite"));
        }
        if sweep.snr_start_db > sweep.snr_stop_db {
            return Err(Error::validation(
                "sweep.snr_start_db",
                "must not exceed sweep.snr_stop_db",
            ));
        }
        if file.techniques.is_empty() {
            return Err(Error::validation(
                "techniques",
                "must name at least one technique",
            ));
        }
        let mut techniques = file.techniques.clone();
        techniques.sort();
        techniques.dedup();
        if techniques.len() != file.techniques.len() {
            return Err(Error::validation("techniques", "lists a technique twice"));
        }

        let mut seen = BTreeSet::new();
        let mut users = Vec::with_capacity(file.users.len());
        for (idx, u) in file.users.iter().enumerate() {
            let field = |name: &str| format!("users[{idx}].{name}");
            if !(1..=file.n_rf).contains(&u.group) {
                return Err(Error::validation(
                    field("group"),
                    format!("must lie in 1..={}", file.n_rf),
                ));
            }
            if !(1..=file.n_b).contains(&u.beam) {
                return Err(Error::validation(
                    field("beam"),
                    format!("must lie in 1..={}", file.n_b),
                ));
            }
            if !u.gain_db.is_finite() {
                return Err(Error::validation(field("gain_db"), "must be finite"));
            }
            if !(u.min_rate >= 0.0 && u.min_rate.is_finite()) {
                return Err(Error::validation(
                    field("min_rate"),
                    "must be nonnegative and finite",
                ));
            }
            if let Some(a) = u.aod_deg {
                if !a.iter().all(|v| v.is_finite()) {
                    return Err(Error::validation(field("aod_deg"), "angles must be finite"));
                }
            }
            if !seen.insert((u.group, u.beam)) {
                return Err(Error::validation(
                    field("group"),
                    format!("duplicate user for (group {}, beam {})", u.group, u.beam),
                ));
            }
            users.push(ScenarioUser {
                group: u.group,
                beam: u.beam,
                gain_sq: file.noise_var * 10f64.powf(u.gain_db / 10.0),
                min_rate: u.min_rate,
                aod: u.aod_deg.map(|[t, p]| Aod::from_degrees(t, p)),
            });
        }
        for group in 1..=file.n_rf {
            for beam in 1..=file.n_b {
                if !seen.contains(&(group, beam)) {
                    return Err(Error::validation(
                        "users",
                        format!("missing user for (group {group}, beam {beam})"),
                    ));
                }
            }
        }

        Ok(Self {
            n_rf: file.n_rf,
            n_b: file.n_b,
            users,
            noise_var: file.noise_var,
            group_gain_tol_db: file.group_gain_tol_db,
            sweep,
            techniques,
            solver_mode: file.solver_mode,
        })
    }

    /// Serializes back to the on-disk schema (dB gains, degrees).
    pub fn to_toml_string(&self) -> String {
        let file = ScenarioFile {
            n_rf: self.n_rf,
            n_b: self.n_b,
            noise_var: self.noise_var,
            group_gain_tol_db: self.group_gain_tol_db,
            techniques: self.techniques.clone(),
            solver_mode: self.solver_mode,
            sweep: self.sweep,
            users: self
                .users
                .iter()
                .map(|u| UserEntry {
                    group: u.group,
                    beam: u.beam,
                    gain_db: 10.0 * (u.gain_sq / self.noise_var).log10(),
                    min_rate: u.min_rate,
                    aod_deg: u.aod.map(|a| [a.theta.to_degrees(), a.phi.to_degrees()]),
                })
                .collect(),
        };
        toml::to_string(&file).expect("scenario serializes to TOML")
    }

    /// The bundled three-group, four-beam scenario.
    pub fn paper_fig3() -> Self {
        Self::from_toml_str(PAPER_FIG3_TOML, Path::new(PAPER_FIG3))
            .expect("bundled scenario is valid")
    }
}

/// Reads and validates a scenario file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ScenarioConfig::from_toml_str(&text, path)
}

/// Like [`parse_config`], but also accepts the name of a bundled scenario.
pub fn load_config(source: &str) -> Result<ScenarioConfig> {
    let path = Path::new(source);
    if source == PAPER_FIG3 && !path.exists() {
        return Ok(ScenarioConfig::paper_fig3());
    }
    parse_config(path)
}
