//! Command-line driver.
//!
//! Subcommands: `check` (hypothesis gates), `run` (single trajectory with CSV
//! and JSON outputs), `sweep-delta` (δ-Cauchy study), `verify` (built-in
//! check suite), `report` (CSV → SVG plots).
//!
//! Exit codes: 0 success, 1 validation error, 2 runtime failure,
//! 3 check/verification failure.

use acns_cli::{config, output};
use acns_core::diagnostics::MonitorConfig;
use acns_core::solver::{self, RunOutcome};
use acns_core::verify;
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use config::RunConfig;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "acns", version, about = "Anisotropic compressible flow toolkit")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides OUTPUT_DIR and the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Proceed with `run` even if the hypothesis check fails.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads for delta sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check hypotheses (H1)-(H4) of the configured tensor; writes a JSON report.
    Check,
    /// Integrate the configured scenario; writes the diagnostics CSV and a JSON summary.
    Run,
    /// Run the scenario once per configured delta and tabulate the pairwise
    /// L2((t0,T)xT^d) velocity differences.
    SweepDelta,
    /// Run the built-in verification suite (no config needed).
    Verify,
    /// Render the scenario's CSV into SVG plots of functionals and residuals.
    Report,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; usage mistakes are
            // validation errors.
            let code = if e.exit_code() == 0 { EXIT_OK } else { EXIT_VALIDATION };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8> {
    match cli.command {
        Command::Verify => cmd_verify(cli),
        _ => {
            let config = match load_config(cli) {
                Ok(config) => config,
                Err(e) => {
                    eprintln!("configuration error: {e:#}");
                    return Ok(EXIT_VALIDATION);
                }
            };
            let out_dir = resolve_out_dir(cli, &config)?;
            match cli.command {
                Command::Check => cmd_check(&config, &out_dir),
                Command::Run => cmd_run(cli, &config, &out_dir),
                Command::SweepDelta => cmd_sweep_delta(cli, &config, &out_dir),
                Command::Report => cmd_report(&config, &out_dir),
                Command::Verify => unreachable!("handled above"),
            }
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_deref()
        .context("--config PATH is required for this subcommand")?;
    RunConfig::load(path)
}

/// Precedence: --out, then OUTPUT_DIR, then the config's output.dir.
fn resolve_out_dir(cli: &Cli, config: &RunConfig) -> Result<PathBuf> {
    let dir = if let Some(dir) = &cli.out {
        dir.clone()
    } else if let Ok(dir) = std::env::var("OUTPUT_DIR") {
        PathBuf::from(dir)
    } else {
        PathBuf::from(&config.output.dir)
    };
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir)
}

fn hypotheses_report(config: &RunConfig) -> Result<acns_core::tensor4::HypothesesReport> {
    let tensor = config.tensor()?;
    let t_end = config.solver.t_end;
    let time_samples: Vec<f64> = (0..=8).map(|i| t_end * i as f64 / 8.0).collect();
    let mut space_samples = Vec::new();
    let quarter: Vec<f64> =
        (0..4).map(|i| std::f64::consts::FRAC_PI_2 * i as f64).collect();
    for &x0 in &quarter {
        for &x1 in &quarter {
            if config.grid.d == 2 {
                space_samples.push([x0, x1, 0.0]);
            } else {
                for &x2 in &quarter {
                    space_samples.push([x0, x1, x2]);
                }
            }
        }
    }
    Ok(tensor.check_hypotheses(config.monitor.eta, &time_samples, &space_samples)?)
}

fn cmd_check(config: &RunConfig, out_dir: &Path) -> Result<u8> {
    let report = hypotheses_report(config)?;
    let path = out_dir.join(format!("{}_hypotheses.json", config.scenario));
    output::write_json(&path, &report)?;
    if report.all_pass() {
        println!(
            "check: all hypotheses pass (margin {:.6e}, H4 ratio {:.3})",
            report.coercivity_margin, report.h4_ratio
        );
        Ok(EXIT_OK)
    } else {
        for failure in &report.failures {
            eprintln!("check: {failure}");
        }
        Ok(EXIT_CHECK_FAILED)
    }
}

/// One member integration: builds data, regularizes, runs, returns outcome.
fn integrate(config: &RunConfig, delta: f64, store_velocity: bool) -> Result<RunOutcome> {
    let law = config.law()?;
    let tensor = config.tensor()?;
    let mut solver_config = config.solver_config(delta)?;
    solver_config.store_velocity = store_velocity;
    let grid = acns_core::SpectralGrid::new(config.grid.d, config.grid.n)?;
    let (rho0, u0) = config.initial.build(&grid, law.m)?;
    let monitor = MonitorConfig { c0: config.monitor.c0, c_tilde: config.monitor.c_tilde };
    Ok(solver::run(&solver_config, &tensor, &law, &rho0, &u0, &monitor)?)
}

fn cmd_run(cli: &Cli, config: &RunConfig, out_dir: &Path) -> Result<u8> {
    let report = hypotheses_report(config)?;
    if !report.all_pass() {
        for failure in &report.failures {
            eprintln!("check: {failure}");
        }
        if !cli.force {
            eprintln!("run refused: hypothesis check failed (use --force to override)");
            return Ok(EXIT_CHECK_FAILED);
        }
        eprintln!("run: continuing despite failed hypotheses (--force)");
    }

    let delta = config.single_delta()?;
    let outcome = integrate(config, delta, false)?;
    let monitor = MonitorConfig { c0: config.monitor.c0, c_tilde: config.monitor.c_tilde };
    let monitor_report =
        acns_core::diagnostics::theorem_monitor(&outcome.samples, &outcome.records, &monitor)?;

    let csv_path = out_dir.join(format!("{}.csv", config.scenario));
    output::write_records_csv(&csv_path, &outcome.records)?;
    let max_of = |f: fn(&acns_core::diagnostics::DiagnosticsRecord) -> f64| {
        outcome.records.iter().map(f).fold(0.0f64, f64::max)
    };
    let summary = output::RunSummary {
        scenario: &config.scenario,
        delta,
        samples: outcome.samples.len(),
        completed: outcome.failure.is_none(),
        failure: outcome.failure.as_ref(),
        final_record: outcome.records.last().expect("at least the t=0 record"),
        max_res_a1: max_of(|r| r.res_a1),
        max_res_a2: max_of(|r| r.res_a2),
        max_res_flux: max_of(|r| r.res_flux),
        max_res_renorm: max_of(|r| r.res_renorm),
        monitor: &monitor_report,
    };
    let json_path = out_dir.join(format!("{}_summary.json", config.scenario));
    output::write_json(&json_path, &summary)?;

    match &outcome.failure {
        None => {
            println!(
                "run: {} samples to t = {:.4}; outputs {} and {}",
                outcome.samples.len(),
                outcome.final_state.t,
                csv_path.display(),
                json_path.display()
            );
            Ok(EXIT_OK)
        }
        Some(failure) => {
            eprintln!("run: stopped at t = {:.6}: {}", failure.t, failure.message);
            Ok(EXIT_RUNTIME)
        }
    }
}

#[derive(Debug, Serialize)]
struct SweepPair {
    delta_coarse: f64,
    delta_fine: f64,
    l2_diff: f64,
}

#[derive(Debug, Serialize)]
struct SweepFailure {
    delta: f64,
    t: f64,
    message: String,
}

#[derive(Debug, Serialize)]
struct SweepSummary<'a> {
    scenario: &'a str,
    t0: f64,
    deltas: Vec<f64>,
    pairs: Vec<SweepPair>,
    decreasing: bool,
    failures: Vec<SweepFailure>,
}

fn cmd_sweep_delta(cli: &Cli, config: &RunConfig, out_dir: &Path) -> Result<u8> {
    let deltas: Vec<f64> = config.sweep_deltas()?.to_vec();
    let jobs = cli.jobs.max(1).min(deltas.len());

    // Fixed-order work queue; member runs are independent.
    let mut results: Vec<Option<Result<RunOutcome, acns_core::Error>>> =
        (0..deltas.len()).map(|_| None).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<Result<RunOutcome, acns_core::Error>>>> =
        (0..deltas.len()).map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if index >= deltas.len() {
                    break;
                }
                let outcome = integrate(config, deltas[index], true)
                    .map_err(|e| acns_core::Error::InvalidArgument(format!("{e:#}")));
                let outcome = match outcome {
                    Ok(o) => Ok(o),
                    Err(e) => Err(e),
                };
                *slots[index].lock().expect("sweep slot") = Some(outcome);
            });
        }
    });
    for (slot, result) in slots.into_iter().zip(results.iter_mut()) {
        *result = slot.into_inner().expect("sweep slot");
    }

    let mut failures = Vec::new();
    let mut outcomes: Vec<Option<RunOutcome>> = Vec::with_capacity(deltas.len());
    for (index, result) in results.into_iter().enumerate() {
        match result.expect("queue visited every index") {
            Ok(outcome) => {
                if let Some(f) = &outcome.failure {
                    failures.push(SweepFailure {
                        delta: deltas[index],
                        t: f.t,
                        message: f.message.clone(),
                    });
                    outcomes.push(Some(outcome));
                } else {
                    outcomes.push(Some(outcome));
                }
            }
            Err(e) => {
                failures.push(SweepFailure {
                    delta: deltas[index],
                    t: 0.0,
                    message: e.to_string(),
                });
                outcomes.push(None);
            }
        }
    }

    // Per-member CSV outputs.
    for (outcome, &delta) in outcomes.iter().zip(&deltas) {
        if let Some(outcome) = outcome {
            let path = out_dir.join(format!("{}_delta{}.csv", config.scenario, delta));
            output::write_records_csv(&path, &outcome.records)?;
        }
    }

    // Cauchy table over consecutive pairs that both completed.
    let t0 = config.sweep.t0;
    let mut pairs = Vec::new();
    for window in 0..deltas.len().saturating_sub(1) {
        let (Some(coarse), Some(fine)) = (&outcomes[window], &outcomes[window + 1]) else {
            continue;
        };
        if coarse.failure.is_some() || fine.failure.is_some() {
            continue;
        }
        pairs.push(SweepPair {
            delta_coarse: deltas[window],
            delta_fine: deltas[window + 1],
            l2_diff: velocity_l2_difference(coarse, fine, t0)?,
        });
    }
    let decreasing = pairs.windows(2).all(|p| p[1].l2_diff < p[0].l2_diff);

    let table_path = out_dir.join(format!("{}_sweep.csv", config.scenario));
    {
        let mut writer = csv::Writer::from_path(&table_path)?;
        writer.write_record(["delta_coarse", "delta_fine", "l2_diff"])?;
        for pair in &pairs {
            writer.write_record([
                format!("{:.12e}", pair.delta_coarse),
                format!("{:.12e}", pair.delta_fine),
                format!("{:.12e}", pair.l2_diff),
            ])?;
        }
        writer.flush()?;
    }
    let summary = SweepSummary {
        scenario: &config.scenario,
        t0,
        deltas: deltas.clone(),
        pairs,
        decreasing,
        failures,
    };
    let json_path = out_dir.join(format!("{}_sweep.json", config.scenario));
    output::write_json(&json_path, &summary)?;

    if summary.failures.is_empty() {
        println!(
            "sweep-delta: {} members, {} pairs, decreasing = {}; table {}",
            deltas.len(),
            summary.pairs.len(),
            decreasing,
            table_path.display()
        );
        Ok(EXIT_OK)
    } else {
        for failure in &summary.failures {
            eprintln!(
                "sweep-delta: member delta = {} failed at t = {:.6}: {}",
                failure.delta, failure.t, failure.message
            );
        }
        Ok(EXIT_RUNTIME)
    }
}

/// `‖u_a − u_b‖_{L²((t0,T)×T^d)}` via trapezoid quadrature over shared
/// sample times.
fn velocity_l2_difference(a: &RunOutcome, b: &RunOutcome, t0: f64) -> Result<f64> {
    anyhow::ensure!(
        a.samples.len() == b.samples.len(),
        "sweep members must share sample times"
    );
    let mut pairs = Vec::new();
    for (sa, sb) in a.samples.iter().zip(&b.samples) {
        anyhow::ensure!(
            (sa.t - sb.t).abs() < 1e-12,
            "sweep members must share sample times"
        );
        if sa.t < t0 - 1e-12 {
            continue;
        }
        let ua = sa.velocity.as_ref().context("sweep sample lacks velocity")?;
        let ub = sb.velocity.as_ref().context("sweep sample lacks velocity")?;
        pairs.push((sa.t, ua.sub(ub).l2_norm_sq()));
    }
    anyhow::ensure!(pairs.len() >= 2, "sweep window [t0, T] holds fewer than two samples");
    let mut integral = 0.0;
    for window in pairs.windows(2) {
        integral += 0.5 * (window[1].0 - window[0].0) * (window[0].1 + window[1].1);
    }
    Ok(integral.sqrt())
}

fn cmd_verify(cli: &Cli) -> Result<u8> {
    let results = verify::run_all()?;
    let mut all_pass = true;
    for check in &results {
        println!(
            "{} {:32} measured {:>12.4e}  tol {:>9.1e}  ({})",
            if check.passed { "pass" } else { "FAIL" },
            check.name,
            check.measured,
            check.tolerance,
            check.detail
        );
        all_pass &= check.passed;
    }
    // A machine-readable copy lands next to the other outputs when an output
    // directory is identifiable without a config.
    if let Some(dir) = cli
        .out
        .clone()
        .or_else(|| std::env::var("OUTPUT_DIR").ok().map(PathBuf::from))
    {
        std::fs::create_dir_all(&dir)?;
        #[derive(Serialize)]
        struct CheckRow<'a> {
            name: &'a str,
            measured: f64,
            tolerance: f64,
            passed: bool,
        }
        let rows: Vec<CheckRow> = results
            .iter()
            .map(|c| CheckRow {
                name: c.name,
                measured: c.measured,
                tolerance: c.tolerance,
                passed: c.passed,
            })
            .collect();
        output::write_json(&dir.join("verify_report.json"), &rows)?;
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_report(config: &RunConfig, out_dir: &Path) -> Result<u8> {
    let csv_path = out_dir.join(format!("{}.csv", config.scenario));
    let rows = match output::read_records_csv(&csv_path) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("report: {e:#} (run the `run` subcommand first)");
            return Ok(EXIT_VALIDATION);
        }
    };
    let (functionals, residuals) = output::render_plots(&rows, &config.scenario);
    let f_path = out_dir.join(format!("{}_functionals.svg", config.scenario));
    let r_path = out_dir.join(format!("{}_residuals.svg", config.scenario));
    std::fs::write(&f_path, functionals)?;
    std::fs::write(&r_path, residuals)?;
    println!("report: wrote {} and {}", f_path.display(), r_path.display());
    Ok(EXIT_OK)
}
