//! Acceptance suite: eight desk-scale criteria covering the scalar laws, the
//! spectral calculus, a reference integration with its identity residuals,
//! commutator decay, the delta sweep and the hypothesis gate.
//!
//! Each criterion prints exactly one `AC-k pass: ...` line on success (visible
//! with `--nocapture`); a failed assertion names the criterion instead.

use acns_core::diagnostics::{self, MonitorConfig};
use acns_core::initial::InitialData;
use acns_core::solver::{self, RunOutcome, SolverConfig};
use acns_core::spectral::{self, ScalarField, SpectralGrid, VectorField};
use acns_core::{PressureLaw, ViscosityTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

// ---------------------------------------------------------------------------
// AC-1: closed-form entropies against quadrature; pressure-gap inequality.
// ---------------------------------------------------------------------------

#[test]
fn ac1_scalar_laws() {
    let start = Instant::now();
    let gammas = [1.4, 5.0 / 3.0, 2.0, 2.5, 3.0];
    let ms = [0.5, 1.0, 2.0, 4.0];
    let rhos: Vec<f64> = (0..10)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 9.0))
        .collect();
    let mut combos = 0;
    for &gamma in &gammas {
        for &m in &ms {
            let law = PressureLaw::new(1.0, gamma, m).unwrap();
            for &rho in &rhos {
                combos += 1;
                for ell in [2u8, 3] {
                    let closed = law.h_ell(rho, ell).unwrap();
                    let quad = law.h_ell_quad(rho, ell).unwrap();
                    assert!(
                        (closed - quad).abs() <= 1e-8 * (1.0 + quad.abs()),
                        "AC-1: H_{ell} mismatch at gamma={gamma} m={m} rho={rho}: \
                         {closed} vs {quad}"
                    );
                }
                let gap = law.ineg2_gap(rho).unwrap();
                let p_diff = law.pressure(rho).unwrap() - law.pressure(m).unwrap();
                let lhs = p_diff * p_diff;
                assert!(
                    gap >= -1e-12 * lhs.max(1.0),
                    "AC-1: gap {gap} < -1e-12 (scaled) at gamma={gamma} m={m} rho={rho}"
                );
                if rho >= m {
                    assert!(
                        gap.abs() <= 1e-10 * lhs.max(1.0),
                        "AC-1: equality branch gap {gap} at gamma={gamma} m={m} rho={rho}"
                    );
                }
            }
        }
    }
    assert_eq!(combos, 200, "AC-1: combo count");

    // Exact reference point: gamma = 2, M = 1, rho = 2 makes both sides 9.
    let law = PressureLaw::new(1.0, 2.0, 1.0).unwrap();
    let lhs = {
        let p_diff = law.pressure(2.0).unwrap() - law.pressure(1.0).unwrap();
        p_diff * p_diff
    };
    let rhs = lhs + law.ineg2_gap(2.0).unwrap();
    assert!((lhs - 9.0).abs() < 1e-12, "AC-1: exact LHS {lhs} != 9");
    assert!((rhs - 9.0).abs() < 1e-10, "AC-1: exact RHS {rhs} != 9");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "AC-1: runtime {elapsed:.1}s exceeds 10s");
    println!("AC-1 pass: 200 combos, entropies to 1e-8, gap >= -1e-12, exact case 9=9 ({elapsed:.2}s)");
}

// ---------------------------------------------------------------------------
// AC-2: transform round trip, Plancherel split, inverse operators, Poincare.
// ---------------------------------------------------------------------------

fn random_mean_free(grid: &Arc<SpectralGrid>, rng: &mut ChaCha8Rng) -> ScalarField {
    let data: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let raw = ScalarField::from_data(grid, data).unwrap().dealias();
    let mean = raw.mean();
    raw.map(|v| v - mean)
}

#[test]
fn ac2_spectral_calculus() {
    let start = Instant::now();
    let grid = SpectralGrid::new(2, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    // Transform round trip on white noise.
    let data: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let field = ScalarField::from_data(&grid, data.clone()).unwrap();
    let back = ScalarField::from_spectrum(&grid, &field.to_spectrum());
    let mut round_trip = 0.0f64;
    for (a, b) in data.iter().zip(back.data()) {
        round_trip = round_trip.max((a - b).abs());
    }
    assert!(round_trip <= 1e-13, "AC-2: round trip error {round_trip:.3e}");

    // Plancherel split of the gradient energy in d = 2.
    let mut plancherel = 0.0f64;
    for _ in 0..10 {
        let u = VectorField::from_comps(vec![
            random_mean_free(&grid, &mut rng),
            random_mean_free(&grid, &mut rng),
        ]);
        let (curl, div, grad) = spectral::cz_split_norms(&u, 2.0);
        let gap = (grad * grad - div * div - curl * curl).abs() / (grad * grad);
        plancherel = plancherel.max(gap);
    }
    assert!(plancherel <= 1e-11, "AC-2: Plancherel gap {plancherel:.3e}");

    // Delta^-1 div recovers the potential of a gradient field.
    let sin_x1 = ScalarField::from_fn(&grid, |x| x[0].sin());
    let recovered = spectral::inv_lap_div(&sin_x1.grad());
    let inv_err = recovered.sub(&sin_x1).max_abs();
    assert!(inv_err <= 1e-12, "AC-2: inv_lap_div error {inv_err:.3e}");

    // Poincare with constant one on mean-free band-limited fields.
    let mut worst_ratio = 0.0f64;
    for _ in 0..100 {
        let f = random_mean_free(&grid, &mut rng);
        let ratio = f.l2_norm() / f.grad().lp_norm(2.0);
        worst_ratio = worst_ratio.max(ratio);
    }
    assert!(worst_ratio <= 1.0 + 1e-12, "AC-2: Poincare ratio {worst_ratio}");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "AC-2: runtime {elapsed:.1}s exceeds 10s");
    println!(
        "AC-2 pass: round trip {round_trip:.1e}, Plancherel {plancherel:.1e}, \
         inv_lap_div {inv_err:.1e}, Poincare ratio {worst_ratio:.6} ({elapsed:.2}s)"
    );
}

// ---------------------------------------------------------------------------
// Shared reference run for AC-3/4/5: n = 64 anisotropic acoustic scenario.
// ---------------------------------------------------------------------------

struct Reference {
    outcome: RunOutcome,
    tensor: ViscosityTensor,
    law: PressureLaw,
    run_seconds: f64,
}

fn reference() -> &'static Reference {
    static RUN: OnceLock<Reference> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let law = PressureLaw::new(1.0, 2.0, 1.0).unwrap();
        let tensor = ViscosityTensor::random_symmetric(2, 1.0, 0.0, 42, 0.05).unwrap();
        // The amplitude respects (H4) with eta = 0.1: sup |eps| <= 0.1 min(mu, 2mu+lambda).
        let report = tensor
            .check_hypotheses(0.1, &[0.0, 0.5, 1.0], &[[0.0, 0.0, 0.0]])
            .unwrap();
        assert!(report.all_pass(), "reference tensor must satisfy (H1)-(H4)");

        let config = SolverConfig {
            d: 2,
            n: 64,
            delta: 0.1,
            cfl: 0.4,
            t_end: 1.0,
            rho_floor: 1e-6,
            dealias: true,
            cadence_dt: 0.0125,
            store_velocity: false,
        };
        let grid = SpectralGrid::new(2, 64).unwrap();
        let (rho0, u0) = InitialData::Acoustic { k: 1, eps: 0.01 }.build(&grid, law.m).unwrap();
        let outcome =
            solver::run(&config, &tensor, &law, &rho0, &u0, &MonitorConfig::default()).unwrap();
        assert!(outcome.failure.is_none(), "reference run must complete");
        assert_eq!(outcome.samples.len(), 81, "reference run sample count");
        Reference { outcome, tensor, law, run_seconds: start.elapsed().as_secs_f64() }
    })
}

#[test]
fn ac3_reference_run_conservation_and_energy() {
    let r = reference();
    let start = Instant::now();
    let samples = &r.outcome.samples;
    let m_ref = r.law.m;

    let mass0 = samples[0].mass_mean;
    let mut mass_drift = 0.0f64;
    let mut momentum_drift = 0.0f64;
    for sample in samples {
        mass_drift = mass_drift.max((sample.mass_mean - mass0).abs());
        for axis in 0..3 {
            momentum_drift = momentum_drift
                .max((sample.momentum_mean[axis] - samples[0].momentum_mean[axis]).abs());
        }
    }
    assert!(mass_drift <= 1e-10 * m_ref, "AC-3: mass drift {mass_drift:.3e}");
    assert!(momentum_drift <= 1e-9, "AC-3: momentum drift {momentum_drift:.3e}");

    let excess = diagnostics::energy_inequality_excess(samples, &r.tensor).unwrap();
    assert!(excess <= 1e-4, "AC-3: energy inequality excess {excess:.3e}");

    let monitor = MonitorConfig::default();
    let report = diagnostics::theorem_monitor(samples, &r.outcome.records, &monitor).unwrap();
    assert!(report.all_finite, "AC-3: non-finite monitor values");
    assert!(report.max_bootstrap_ratio.is_finite(), "AC-3: bootstrap ratio not finite");
    assert!(
        report.crossing_time.is_none(),
        "AC-3: bootstrap crossed threshold at t = {:?}",
        report.crossing_time
    );

    let elapsed = r.run_seconds + start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "AC-3: runtime {elapsed:.1}s exceeds 60s");
    println!(
        "AC-3 pass: mass drift {mass_drift:.1e}, momentum drift {momentum_drift:.1e}, \
         energy excess {excess:.1e}, monitor finite and non-crossing ({elapsed:.1}s)"
    );
}

#[test]
fn ac4_identity_residual_convergence() {
    let r = reference();
    let start = Instant::now();
    let samples = &r.outcome.samples;

    let res = |stride: usize| {
        (
            diagnostics::a1_identity_residual(samples, stride, &r.tensor, &r.law).unwrap(),
            diagnostics::a2_identity_residual(samples, stride, &r.tensor, &r.law).unwrap(),
        )
    };
    let (a1_4, a2_4) = res(4);
    let (a1_2, a2_2) = res(2);
    let (a1_1, a2_1) = res(1);
    for (coarse, fine, name) in [
        (a1_4, a1_2, "A1 first halving"),
        (a1_2, a1_1, "A1 second halving"),
        (a2_4, a2_2, "A2 first halving"),
        (a2_2, a2_1, "A2 second halving"),
    ] {
        assert!(
            coarse >= 3.5 * fine,
            "AC-4: {name} ratio {:.2} < 3.5 ({coarse:.3e} -> {fine:.3e})",
            coarse / fine
        );
    }

    let mut worst_flux = 0.0f64;
    for sample in samples {
        worst_flux = worst_flux.max(sample.flux_residual);
    }
    assert!(worst_flux <= 1e-8, "AC-4: flux residual {worst_flux:.3e}");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 180.0, "AC-4: runtime {elapsed:.1}s exceeds 3min");
    println!(
        "AC-4 pass: resA1 {a1_4:.1e}->{a1_2:.1e}->{a1_1:.1e}, \
         resA2 {a2_4:.1e}->{a2_2:.1e}->{a2_1:.1e}, flux <= {worst_flux:.1e} ({elapsed:.2}s)"
    );
}

#[test]
fn ac5_renormalization_second_order() {
    let r = reference();
    let samples = &r.outcome.samples;
    let mut summary = Vec::new();
    for (slot, name) in [(0usize, "alpha=2"), (1, "alpha=gamma")] {
        let coarse = diagnostics::renorm_residual(samples, 4, slot).unwrap();
        let mid = diagnostics::renorm_residual(samples, 2, slot).unwrap();
        let fine = diagnostics::renorm_residual(samples, 1, slot).unwrap();
        for (hi, lo, stage) in [(coarse, mid, "first"), (mid, fine, "second")] {
            assert!(
                hi >= 3.0 * lo,
                "AC-5: {name} {stage} halving ratio {:.2} < 3.0 ({hi:.3e} -> {lo:.3e})",
                hi / lo
            );
        }
        summary.push(format!("{name}: {coarse:.1e}->{mid:.1e}->{fine:.1e}"));
    }
    println!("AC-5 pass: renormalization residuals second order ({})", summary.join("; "));
}

// ---------------------------------------------------------------------------
// AC-6: DiPerna-Lions commutator decay and norm bound.
// ---------------------------------------------------------------------------

#[test]
fn ac6_commutator_decay() {
    let grid = SpectralGrid::new(2, 64).unwrap();
    // The differentiated factor is a; b multiplies from outside.
    let a = ScalarField::from_fn(&grid, |x| (2.0 * x[1]).cos());
    let b = ScalarField::from_fn(&grid, |x| x[0].sin());
    let normalizer = a.grad().lp_norm(2.0) * b.max_abs();

    let deltas = [0.4, 0.2, 0.1, 0.05];
    let norms: Vec<f64> = deltas
        .iter()
        .map(|&delta| {
            spectral::commutator_r1(&a, &b, delta).unwrap().l2_norm_sq().sqrt()
        })
        .collect();
    for pair in norms.windows(2) {
        assert!(pair[1] < pair[0], "AC-6: norms not strictly decreasing: {norms:?}");
        let ratio = pair[1] / pair[0];
        assert!(ratio <= 0.75, "AC-6: halving ratio {ratio:.3} > 0.75");
    }
    let constant = norms[0] / normalizer;
    assert!(
        constant <= 1.0 + 1e-6,
        "AC-6: measured constant {constant:.3e} exceeds 1 + 1e-6"
    );
    println!(
        "AC-6 pass: ||r1||_2 = {:?} strictly decreasing, constant {constant:.3e} <= 1",
        norms.iter().map(|n| format!("{n:.2e}")).collect::<Vec<_>>()
    );
}

// ---------------------------------------------------------------------------
// AC-7: delta sweep is Cauchy in L2((0.25, 1) x T^2).
// ---------------------------------------------------------------------------

#[test]
fn ac7_delta_sweep_cauchy() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("sweep.toml");
    std::fs::write(
        &config_path,
        r#"
scenario = "ac7"

[grid]
d = 2
n = 64

[law]
a = 1.0
gamma = 2.0
m = 1.0

[viscosity]
mu = 1.0
lambda = 0.0

[tensor]
preset = "random_symmetric"
seed = 42
amp = 0.05

[initial]
kind = "acoustic"
k = 1
eps = 0.01

[solver]
deltas = [0.4, 0.2, 0.1]
t_end = 1.0
cadence_dt = 0.025
"#,
    )
    .unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_acns"))
        .args(["sweep-delta", "--config"])
        .arg(&config_path)
        .args(["--jobs", "3"])
        .arg("--out")
        .arg(dir.path().join("out"))
        .env_remove("OUTPUT_DIR")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "AC-7: sweep failed: {output:?}");

    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out").join("ac7_sweep.json")).unwrap(),
    )
    .unwrap();
    assert!(summary["failures"].as_array().unwrap().is_empty(), "AC-7: member failures");
    let pairs = summary["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 2, "AC-7: pair count");
    let diffs: Vec<f64> = pairs.iter().map(|p| p["l2_diff"].as_f64().unwrap()).collect();
    assert!(
        diffs[1] < diffs[0],
        "AC-7: difference column not strictly decreasing: {diffs:?}"
    );

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "AC-7: runtime {elapsed:.1}s exceeds 5min");
    println!("AC-7 pass: L2 differences {diffs:?} strictly decreasing ({elapsed:.1}s)");
}

// ---------------------------------------------------------------------------
// AC-8: hypothesis gate accepts the reference tensor, rejects each violation.
// ---------------------------------------------------------------------------

fn check_exit(dir: &std::path::Path, tensor_section: &str) -> (Option<i32>, String) {
    let text = format!(
        r#"
scenario = "gate"

[grid]
d = 2
n = 16

[law]
a = 1.0
gamma = 2.0
m = 1.0

[viscosity]
mu = 1.0
lambda = 0.0

{tensor_section}

[initial]
kind = "acoustic"
k = 1
eps = 0.01

[solver]
delta = 0.1
t_end = 1.0
"#
    );
    let config_path = dir.join("gate.toml");
    std::fs::write(&config_path, text).unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_acns"))
        .args(["check", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(dir.join("out"))
        .env_remove("OUTPUT_DIR")
        .output()
        .unwrap();
    (output.status.code(), String::from_utf8_lossy(&output.stderr).into_owned())
}

#[test]
fn ac8_hypothesis_gate() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();

    // The reference anisotropic tensor is accepted.
    let (code, stderr) = check_exit(
        dir.path(),
        "[tensor]\npreset = \"random_symmetric\"\nseed = 42\namp = 0.05",
    );
    assert_eq!(code, Some(0), "AC-8: reference tensor rejected: {stderr}");

    // An asymmetric coefficient table violates (H1).
    let mut table = vec![0.0f64; 16];
    table[4] = 0.3; // entry (0,1,0,0) without its symmetric partners
    let inline = format!(
        "[tensor]\npreset = \"inline\"\ntable = [{}]",
        table.iter().map(|v| format!("{v:.1}")).collect::<Vec<_>>().join(", ")
    );
    let (code, stderr) = check_exit(dir.path(), &inline);
    assert_eq!(code, Some(3), "AC-8: asymmetric table accepted");
    assert!(stderr.contains("H1"), "AC-8: expected an H1 failure, got: {stderr}");

    // Amplitude beyond eta * min(mu, 2mu + lambda) violates (H4).
    let (code, stderr) =
        check_exit(dir.path(), "[tensor]\npreset = \"scaled_identity\"\nc = 0.5");
    assert_eq!(code, Some(3), "AC-8: oversized amplitude accepted");
    assert!(stderr.contains("H4"), "AC-8: expected an H4 failure, got: {stderr}");

    // eps_lower >= mu destroys coercivity, violating (H2).
    let (code, stderr) =
        check_exit(dir.path(), "[tensor]\npreset = \"scaled_identity\"\nc = -1.5");
    assert_eq!(code, Some(3), "AC-8: non-coercive tensor accepted");
    assert!(stderr.contains("H2"), "AC-8: expected an H2 failure, got: {stderr}");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "AC-8: runtime {elapsed:.1}s exceeds 5s");
    println!(
        "AC-8 pass: reference tensor accepted; H1/H4/H2 violations rejected by name \
         ({elapsed:.2}s)"
    );
}
