//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or overruns its time limit.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use common::{jittered_deployment, recursion_total, reference_problem, rng, Instance};
use ranoma::signal::{composite_power_monte_carlo, phase_offsets, post_sic_sinr, GroupSymbols};
use ranoma::{
    feasibility, min_power, reduce_beams, run_sweep, solve_closed_form, solve_numeric, user_rate,
    Deployment, ScenarioConfig, Technique,
};

const AGREEMENT_TOL: f64 = 1e-6;
const CONSTRAINT_TOL: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-9;
const RATE_TOL: f64 = 1e-12;
const FLOOR_TOL: f64 = 1e-9;
const RECONSTRUCTION_TOL: f64 = 1e-12;
const MONTE_CARLO_REL_TOL: f64 = 0.01;
const THRESHOLD_TOL: f64 = 1e-3;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn binary(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ranoma"))
        .args(args)
        .output()
        .map_err(|e| format!("could not run binary: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(out.stdout)
}

fn table1() -> Outcome {
    let out = String::from_utf8(binary(&["table1", "--config", "paper_fig3"])?)
        .map_err(|e| e.to_string())?;
    let expected = "technique,rf_chains,time_slots\nOMA,1,12\nRAMA-OMA,1,3\nRA-NOMA,3,1\n";
    if out == expected {
        Ok("OMA (1,12), RAMA-OMA (1,3), RA-NOMA (3,1)".into())
    } else {
        Err(format!("unexpected output:\n{out}"))
    }
}

fn fig3_ordering() -> Outcome {
    let rows = run_sweep(&ScenarioConfig::paper_fig3()).map_err(|e| e.to_string())?;
    let curve = |t: Technique| -> Vec<(f64, Option<f64>)> {
        rows.iter()
            .filter(|r| r.technique == t)
            .map(|r| (r.snr_db, r.sum_rate_bps_hz))
            .collect()
    };
    let oma = curve(Technique::Oma);
    let rama = curve(Technique::RamaOma);
    let noma = curve(Technique::RaNoma);
    let mut problems = Vec::new();

    for (name, c) in [("OMA", &oma), ("RAMA-OMA", &rama), ("RA-NOMA", &noma)] {
        let pts: Vec<(f64, f64)> = c.iter().filter_map(|(s, r)| r.map(|r| (*s, r))).collect();
        for w in pts.windows(2) {
            if w[1].1 < w[0].1 {
                problems.push(format!(
                    "{name} decreases from {} dB to {} dB",
                    w[0].0, w[1].0
                ));
            }
        }
    }
    let mut feasible_points = 0;
    for ((o, r), n) in oma.iter().zip(&rama).zip(&noma) {
        let (Some(o_rate), Some(r_rate)) = (o.1, r.1) else {
            problems.push(format!("baseline missing at {} dB", o.0));
            continue;
        };
        if r_rate < o_rate {
            problems.push(format!(
                "{} dB: RAMA-OMA {r_rate:.6} < OMA {o_rate:.6}",
                o.0
            ));
        }
        if let Some(n_rate) = n.1 {
            feasible_points += 1;
            if n_rate < r_rate {
                problems.push(format!(
                    "{} dB: RA-NOMA {n_rate:.6} < RAMA-OMA {r_rate:.6}",
                    n.0
                ));
            }
        }
    }
    if problems.is_empty() {
        Ok(format!(
            "{feasible_points} feasible RA-NOMA points, ordering and monotonicity hold"
        ))
    } else {
        Err(problems.join("; "))
    }
}

fn feasibility_threshold() -> Outcome {
    let bp = reference_problem(1.0);
    let report = feasibility(&bp);
    let oracle = recursion_total(bp.gains_sq(), bp.rate_floors(), 0.25, 1.0);
    let diff = (report.min_total_power - oracle).abs();
    let threshold = report.threshold_db(1.0);
    let msg = format!(
        "||p*|| = {:.6}, recursion {oracle:.6}, |diff| = {diff:.1e}, threshold {threshold:.4} dB",
        report.min_total_power
    );
    if diff <= THRESHOLD_TOL
        && (report.min_total_power - 8.894).abs() < 1e-3
        && (threshold - 9.49).abs() < 0.01
    {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn solver_equivalence() -> Outcome {
    let mut r = rng(1000);
    let (mut worst_rate, mut worst_budget, mut worst_floor) = (0f64, 0f64, 0f64);
    for case in 0..1000 {
        let inst = Instance::random(&mut r);
        let bp = inst.feasible_problem(&mut r);
        let closed =
            solve_closed_form(&bp).map_err(|e| format!("case {case}: closed form: {e}"))?;
        let numeric = solve_numeric(&bp).map_err(|e| format!("case {case}: numeric: {e}"))?;
        worst_rate = worst_rate.max((closed.beam_sum_rate - numeric.beam_sum_rate).abs());
        for res in [&closed, &numeric] {
            let total: f64 = res.powers.iter().sum();
            worst_budget = worst_budget.max((total - bp.p_max()).abs() / bp.p_max().max(1.0));
            if res.powers.iter().any(|p| *p < 0.0) {
                return Err(format!("case {case}: negative power"));
            }
            for (rate, floor) in res.per_group_rates.iter().zip(bp.rate_floors()) {
                worst_floor = worst_floor.max(floor - rate);
            }
        }
    }
    let msg = format!(
        "1000 instances, max |rate diff| {worst_rate:.1e}, budget error {worst_budget:.1e}, floor shortfall {worst_floor:.1e}"
    );
    if worst_rate <= AGREEMENT_TOL
        && worst_budget <= CONSTRAINT_TOL
        && worst_floor <= CONSTRAINT_TOL
    {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn boundary_continuity() -> Outcome {
    let mut r = rng(100);
    let mut worst = 0f64;
    for case in 0..100 {
        let inst = Instance::random(&mut r);
        let p_min = inst.min_total();
        let res = solve_closed_form(&inst.problem(p_min * (1.0 + 1e-9)))
            .map_err(|e| format!("case {case}: {e}"))?;
        let floors: f64 = inst.floors.iter().sum();
        worst = worst.max((res.beam_sum_rate - floors).abs());
    }
    let msg = format!("100 instances, max |R - sum floors| {worst:.1e}");
    if worst <= AGREEMENT_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn recursion_identity() -> Outcome {
    let mut r = rng(10_000);
    let mut worst = 0f64;
    for _ in 0..10_000 {
        let inst = Instance::random(&mut r);
        let bp = inst.problem(1.0);
        let recursion: f64 = min_power(&bp).iter().sum();
        worst = worst.max((recursion - feasibility(&bp).min_total_power).abs());
    }
    let msg = format!("10000 instances, max |diff| {worst:.1e}");
    if worst <= IDENTITY_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_deployment<R: Rng>(r: &mut R, equal_within_group: bool) -> Result<Deployment, String> {
    let n = r.random_range(1..=5);
    let n_b = r.random_range(1..=4);
    let gains: Vec<f64> = (0..n)
        .map(|i| 0.01 * 10f64.powf(r.random_range(0.0..0.1)) * 2f64.powi(i as i32))
        .collect();
    let floors: Vec<f64> = (0..n).map(|_| r.random_range(0.0..1.0)).collect();
    if equal_within_group {
        let base = jittered_deployment(r, &gains, &floors, n_b, 0.0);
        let users = base
            .users()
            .iter()
            .cloned()
            .map(|mut u| {
                u.min_rate = floors[u.group];
                u
            })
            .collect();
        Deployment::new(n, n_b, users, 1.0, 0.0).map_err(|e| e.to_string())
    } else {
        Ok(jittered_deployment(r, &gains, &floors, n_b, 1.0))
    }
}

fn rate_consistency() -> Outcome {
    let mut r = rng(7);
    let (mut worst_rate, mut worst_floor) = (0f64, 0f64);
    for _ in 0..500 {
        let dep = random_deployment(&mut r, false)?;
        let p: Vec<f64> = (0..dep.n_rf()).map(|_| r.random_range(0.0..50.0)).collect();
        for i in 0..dep.n_rf() {
            for k in 0..dep.n_b() {
                let sinr = post_sic_sinr(i, k, &p, dep.alpha(), &dep).map_err(|e| e.to_string())?;
                let rate = user_rate(i, k, &p, dep.alpha(), &dep).map_err(|e| e.to_string())?;
                worst_rate = worst_rate.max(((1.0 + sinr).log2() - rate).abs());
            }
        }

        let dep = random_deployment(&mut r, true)?;
        let bp = reduce_beams(&dep, 1.0).map_err(|e| e.to_string())?;
        let p = min_power(&bp);
        for i in 0..dep.n_rf() {
            for k in 0..dep.n_b() {
                let rate = user_rate(i, k, &p, dep.alpha(), &dep).map_err(|e| e.to_string())?;
                worst_floor = worst_floor.max((rate - bp.rate_floors()[i]).abs());
            }
        }
    }
    let msg = format!(
        "500 deployments, max SINR/rate gap {worst_rate:.1e}, max floor gap {worst_floor:.1e}"
    );
    if worst_rate <= RATE_TOL && worst_floor <= FLOOR_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn signal_layer() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0f64;
    for _ in 0..1000 {
        let n_b = r.random_range(1..=8);
        let symbols: Vec<Complex64> = (0..n_b)
            .map(|_| Complex64::from_polar(1.0, r.random_range(-10.0..10.0)))
            .collect();
        let sym = GroupSymbols::new(0, symbols).map_err(|e| e.to_string())?;
        let pv = phase_offsets(&sym).map_err(|e| e.to_string())?;
        for (got, want) in pv.apply(sym.symbols()[0]).iter().zip(sym.symbols()) {
            worst = worst.max((got - want).norm());
        }
    }
    let powers = [6.32921762, 1.96934675, 0.59479342];
    let alpha = 0.25;
    let est = composite_power_monte_carlo(&powers, alpha, 4, 4, 100_000, 2024)
        .map_err(|e| e.to_string())?;
    let expected = alpha * powers.iter().sum::<f64>();
    let rel = (est - expected).abs() / expected;
    let msg = format!(
        "reconstruction error {worst:.1e}, Monte Carlo {est:.5} vs {expected:.5} ({:.3}%)",
        rel * 100.0
    );
    if worst <= RECONSTRUCTION_TOL && rel <= MONTE_CARLO_REL_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn determinism() -> Outcome {
    let a = binary(&["sweep", "--config", "paper_fig3"])?;
    let b = binary(&["sweep", "--config", "paper_fig3"])?;
    if a == b && !a.is_empty() {
        Ok(format!("{} bytes, identical", a.len()))
    } else {
        Err("sweep outputs differ".into())
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("table_i_reproduction", Some(Duration::from_secs(1)), table1),
        ("fig3_ordering", Some(Duration::from_secs(5)), fig3_ordering),
        (
            "feasibility_threshold",
            Some(Duration::from_secs(1)),
            feasibility_threshold,
        ),
        (
            "closed_form_oracle_equivalence",
            Some(Duration::from_secs(60)),
            solver_equivalence,
        ),
        (
            "boundary_continuity",
            Some(Duration::from_secs(5)),
            boundary_continuity,
        ),
        (
            "recursion_closed_form_identity",
            Some(Duration::from_secs(10)),
            recursion_identity,
        ),
        ("cross_module_rate_consistency", None, rate_consistency),
        ("signal_layer_checks", None, signal_layer),
        ("sweep_determinism", None, determinism),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let overrun = limit.filter(|l| elapsed > *l);
        let budget = limit.map_or("no limit".to_owned(), |l| format!("limit {:.0?}", l));
        match (outcome, overrun) {
            (Ok(msg), None) => println!("PASS {name}: {msg} [{elapsed:.2?}, {budget}]"),
            (Ok(msg), Some(_)) => {
                failed += 1;
                println!("FAIL {name}: over time: {msg} [{elapsed:.2?}, {budget}]");
            }
            (Err(msg), _) => {
                failed += 1;
                println!("FAIL {name}: {msg} [{elapsed:.2?}, {budget}]");
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
