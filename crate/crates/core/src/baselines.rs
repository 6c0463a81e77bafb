//! Comparison schemes and their resource cost.
//!
//! All rates are per time slot: the aggregate over a full schedule is divided
//! by the number of slots it takes, with the whole budget `P_max` available
//! in every slot.
//!
//! * OMA: one RF chain, one user per slot, `N_RF · N_B` slots.
//! * RAMA-OMA: one RF chain, one RAMA group per slot (its `N_B` users on
//!   separate beams, each with `P_max / N_B`), `N_RF` slots.
//! * RA-NOMA: `N_RF` RF chains, everyone in one slot.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::Deployment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Technique {
    #[serde(rename = "OMA")]
    Oma,
    #[serde(rename = "RAMA-OMA")]
    RamaOma,
    #[serde(rename = "RA-NOMA")]
    RaNoma,
}

impl Technique {
    pub const ALL: [Technique; 3] = [Technique::Oma, Technique::RamaOma, Technique::RaNoma];

    pub fn name(self) -> &'static str {
        match self {
            Technique::Oma => "OMA",
            Technique::RamaOma => "RAMA-OMA",
            Technique::RaNoma => "RA-NOMA",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Technique::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown technique `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceAccount {
    pub technique: Technique,
    pub rf_chains: usize,
    pub time_slots: usize,
}

pub fn resource_accounting(technique: Technique, dep: &Deployment) -> ResourceAccount {
    let (rf_chains, time_slots) = match technique {
        Technique::Oma => (1, dep.n_rf() * dep.n_b()),
        Technique::RamaOma => (1, dep.n_rf()),
        Technique::RaNoma => (dep.n_rf(), 1),
    };
    ResourceAccount {
        technique,
        rf_chains,
        time_slots,
    }
}

fn awgn_rate(power: f64, gain_sq: f64, noise_var: f64) -> f64 {
    (1.0 + power * gain_sq / noise_var).log2()
}

/// Per-slot sum rate of TDMA with every user alone in its slot at full power.
pub fn oma_sum_rate(dep: &Deployment, p_max: f64) -> f64 {
    let slots = resource_accounting(Technique::Oma, dep).time_slots as f64;
    let total: f64 = dep
        .users()
        .iter()
        .map(|u| awgn_rate(p_max, u.gain_sq, dep.noise_var()))
        .sum();
    total / slots
}

/// Per-slot sum rate of RAMA serving one group per slot over equal-power beams.
pub fn rama_oma_sum_rate(dep: &Deployment, p_max: f64) -> f64 {
    let slots = resource_accounting(Technique::RamaOma, dep).time_slots as f64;
    let per_beam = p_max * dep.alpha();
    let total: f64 = dep
        .users()
        .iter()
        .map(|u| awgn_rate(per_beam, u.gain_sq, dep.noise_var()))
        .sum();
    total / slots
}
