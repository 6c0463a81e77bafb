use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ranoma::sweep::csv_string;
use ranoma::{
    build_deployment, emit_csv, feasibility, load_config, reduce_beams, resource_accounting,
    run_sweep, Error, SolverMode, Technique,
};

#[derive(Parser)]
#[command(
    name = "ranoma",
    version,
    about = "RA-NOMA power allocation and sum-rate sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Closed,
    Numeric,
    Both,
}

impl From<SolverArg> for SolverMode {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Closed => SolverMode::ClosedForm,
            SolverArg::Numeric => SolverMode::Numeric,
            SolverArg::Both => SolverMode::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sum rate of each technique over the configured SNR grid, as CSV.
    Sweep {
        /// Scenario file, or `paper_fig3` for the bundled scenario.
        #[arg(long)]
        config: String,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the scenario's solver mode.
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
    },
    /// Minimum total power meeting every rate floor, and the matching SNR.
    Feasibility {
        #[arg(long)]
        config: String,
    },
    /// RF chains and time slots needed by each technique.
    Table1 {
        #[arg(long)]
        config: String,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::Validation { .. }
        | Error::Schema(_)
        | Error::Grouping(_)
        | Error::InvalidInput(_) => 2,
        Error::Infeasible { .. } => 3,
        Error::SolverDisagreement { .. } | Error::Solver { .. } => 4,
        Error::Io { .. } => 1,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Sweep {
            config,
            out,
            solver,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = solver {
                cfg.solver_mode = s.into();
            }
            let rows = run_sweep(&cfg)?;
            match out {
                Some(path) => emit_csv(&rows, &path)?,
                None => {
                    let text = csv_string(&rows)?;
                    std::io::stdout()
                        .write_all(text.as_bytes())
                        .map_err(|source| Error::Io {
                            path: PathBuf::from("<stdout>"),
                            source,
                        })?;
                }
            }
            let ra_noma: Vec<_> = rows
                .iter()
                .filter(|r| r.technique == Technique::RaNoma)
                .collect();
            if !ra_noma.is_empty() && ra_noma.iter().all(|r| !r.feasible) {
                eprintln!("RA-NOMA rate floors are infeasible at every SNR point");
                return Ok(3);
            }
            Ok(0)
        }
        Command::Feasibility { config } => {
            let cfg = load_config(&config)?;
            let dep = build_deployment(&cfg)?;
            // The budget does not enter the minimum-power computation.
            let report = feasibility(&reduce_beams(&dep, 1.0)?);
            println!("min_total_power = {:.6}", report.min_total_power);
            println!(
                "threshold_snr_db = {:.6}",
                report.threshold_db(cfg.noise_var)
            );
            let powers: Vec<String> = report
                .min_powers
                .iter()
                .map(|p| format!("{p:.6}"))
                .collect();
            println!("min_powers = [{}]", powers.join(", "));
            Ok(0)
        }
        Command::Table1 { config } => {
            let cfg = load_config(&config)?;
            let dep = build_deployment(&cfg)?;
            println!("technique,rf_chains,time_slots");
            for t in Technique::ALL {
                let acct = resource_accounting(t, &dep);
                println!("{},{},{}", t, acct.rf_chains, acct.time_slots);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
