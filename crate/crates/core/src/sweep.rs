//! Transmit-SNR sweeps and their CSV output.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::allocator::{
    feasibility, reduce_beams, solve_closed_form, solve_numeric, total_sum_rate,
};
use crate::baselines::{oma_sum_rate, rama_oma_sum_rate, Technique};
use crate::config::{ScenarioConfig, SolverMode};
use crate::error::{Error, Result};
use crate::model::{build_deployment, Deployment};

/// Largest beam sum-rate gap tolerated between the two solvers in `both` mode.
pub const SOLVER_AGREEMENT_TOL: f64 = 1e-6;

pub const CSV_HEADER: [&str; 5] = [
    "snr_db",
    "technique",
    "sum_rate_bps_hz",
    "feasible",
    "min_total_power",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub technique: Technique,
    /// `None` for RA-NOMA points where the rate floors cannot be met.
    pub sum_rate_bps_hz: Option<f64>,
    pub feasible: bool,
    /// Minimum total power for the floors; RA-NOMA rows only.
    pub min_total_power: Option<f64>,
}

fn ra_noma_row(dep: &Deployment, snr_db: f64, p_max: f64, mode: SolverMode) -> Result<SweepRow> {
    let bp = reduce_beams(dep, p_max)?;
    let report = feasibility(&bp);
    let mut row = SweepRow {
        snr_db,
        technique: Technique::RaNoma,
        sum_rate_bps_hz: None,
        feasible: report.feasible,
        min_total_power: Some(report.min_total_power),
    };
    if !report.feasible {
        return Ok(row);
    }
    let result = match mode {
        SolverMode::ClosedForm => solve_closed_form(&bp)?,
        SolverMode::Numeric => solve_numeric(&bp)?,
        SolverMode::Both => {
            let closed = solve_closed_form(&bp)?;
            let numeric = solve_numeric(&bp)?;
            if (closed.beam_sum_rate - numeric.beam_sum_rate).abs() > SOLVER_AGREEMENT_TOL {
                return Err(Error::SolverDisagreement {
                    snr_db,
                    closed_form: closed.beam_sum_rate,
                    numeric: numeric.beam_sum_rate,
                });
            }
            closed
        }
    };
    row.sum_rate_bps_hz = Some(total_sum_rate(&result, dep.n_b()));
    Ok(row)
}

fn rows_at(dep: &Deployment, cfg: &ScenarioConfig, snr_db: f64) -> Result<Vec<SweepRow>> {
    let p_max = cfg.noise_var * 10f64.powf(snr_db / 10.0);
    cfg.techniques
        .iter()
        .map(|&technique| match technique {
            Technique::RaNoma => ra_noma_row(dep, snr_db, p_max, cfg.solver_mode),
            Technique::Oma | Technique::RamaOma => {
                let rate = if technique == Technique::Oma {
                    oma_sum_rate(dep, p_max)
                } else {
                    rama_oma_sum_rate(dep, p_max)
                };
                Ok(SweepRow {
                    snr_db,
                    technique,
                    sum_rate_bps_hz: Some(rate),
                    feasible: true,
                    min_total_power: None,
                })
            }
        })
        .collect()
}

/// Evaluates every requested technique at every SNR point.
///
/// Points run in parallel; rows come back ordered by SNR, then technique.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    let dep = build_deployment(cfg)?;
    let per_point: Vec<Vec<SweepRow>> = cfg
        .sweep
        .points()
        .into_par_iter()
        .map(|snr_db| rows_at(&dep, cfg, snr_db))
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = per_point.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.snr_db
            .total_cmp(&b.snr_db)
            .then(a.technique.cmp(&b.technique))
    });
    Ok(rows)
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

pub fn csv_string(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::invalid("no sweep rows to write"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::invalid(format!("csv encoding failed: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            fixed(r.snr_db),
            r.technique.to_string(),
            r.sum_rate_bps_hz.map(fixed).unwrap_or_default(),
            r.feasible.to_string(),
            r.min_total_power.map(fixed).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::invalid(format!("csv encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Writes the sweep as CSV. Nothing is created when `rows` is empty.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let text = csv_string(rows)?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
