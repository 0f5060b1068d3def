//! End-to-end tests of the `acns` binary: exit codes, output files,
//! determinism, and config round-tripping.

use acns_cli::config::RunConfig;
use acns_cli::output::CSV_COLUMNS;
use std::path::Path;
use std::process::{Command, Output};

fn base_config(scenario: &str) -> String {
    format!(
        r#"
scenario = "{scenario}"

[grid]
d = 2      # spatial dimension
n = 16     # points per axis

[law]
a = 1.0    # pressure coefficient
gamma = 2.0
m = 1.0    # mean density

[viscosity]
mu = 0.5
lambda = 0.0

[tensor]
preset = "random_symmetric"
seed = 7
amp = 0.002

[initial]
kind = "acoustic"
k = 1
eps = 0.01

[solver]
delta = 0.2        # mollification width
t_end = 0.1        # seconds
cadence_dt = 0.02  # diagnostics cadence
"#
    )
}

fn acns(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acns"))
        .args(args)
        .current_dir(dir)
        .env_remove("OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn config_round_trip_is_identity() {
    let parsed: RunConfig = toml::from_str(&base_config("round_trip")).unwrap();
    parsed.validate().unwrap();
    let serialized = toml::to_string(&parsed).unwrap();
    let reparsed: RunConfig = toml::from_str(&serialized).unwrap();
    assert_eq!(parsed, reparsed);
    // And once more to make sure serialization itself is stable.
    assert_eq!(serialized, toml::to_string(&reparsed).unwrap());
}

#[test]
fn config_validation_rejections() {
    let mut bad_scenario: RunConfig = toml::from_str(&base_config("ok")).unwrap();
    bad_scenario.scenario = "bad name!".into();
    assert!(bad_scenario.validate().is_err());

    let mut no_delta: RunConfig = toml::from_str(&base_config("ok")).unwrap();
    no_delta.solver.delta = None;
    assert!(no_delta.validate().is_err());

    let mut increasing: RunConfig = toml::from_str(&base_config("ok")).unwrap();
    increasing.solver.delta = None;
    increasing.solver.deltas = Some(vec![0.1, 0.2]);
    assert!(increasing.validate().is_err());

    let mut bad_t0: RunConfig = toml::from_str(&base_config("ok")).unwrap();
    bad_t0.solver.delta = None;
    bad_t0.solver.deltas = Some(vec![0.2, 0.1]);
    bad_t0.sweep.t0 = 5.0;
    assert!(bad_t0.validate().is_err());

    assert!(toml::from_str::<RunConfig>("scenario = \"x\"\nunknown = 1").is_err());
}

#[test]
fn missing_and_invalid_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let output = acns(&["run"], dir.path());
    assert_eq!(output.status.code(), Some(1), "run without --config");

    let output = acns(&["run", "--config", "nope.toml"], dir.path());
    assert_eq!(output.status.code(), Some(1), "missing config file");

    let path = write_config(dir.path(), "bad.toml", "scenario = [1, 2]");
    let output = acns(&["run", "--config", &path], dir.path());
    assert_eq!(output.status.code(), Some(1), "unparseable config");

    let output = acns(&["frobnicate"], dir.path());
    assert_eq!(output.status.code(), Some(1), "unknown subcommand");

    let output = acns(&["--help"], dir.path());
    assert_eq!(output.status.code(), Some(0), "--help is a success");
}

#[test]
fn run_and_report_produce_versioned_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.toml", &base_config("smoke"));
    let out = dir.path().join("out");
    let out_str = out.to_str().unwrap();

    let output = acns(&["check", "--config", &config, "--out", out_str], dir.path());
    assert_eq!(output.status.code(), Some(0), "check: {output:?}");
    assert!(out.join("smoke_hypotheses.json").is_file());

    let output = acns(&["run", "--config", &config, "--out", out_str], dir.path());
    assert_eq!(output.status.code(), Some(0), "run: {output:?}");
    let csv = std::fs::read_to_string(out.join("smoke.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, CSV_COLUMNS.join(","));
    // t_end/cadence = 5 intervals => 6 sample rows.
    assert_eq!(csv.lines().count(), 7);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("smoke_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["completed"], serde_json::Value::Bool(true));
    assert_eq!(summary["samples"], serde_json::json!(6));
    assert!(summary["monitor"]["all_finite"].as_bool().unwrap());

    let output = acns(&["report", "--config", &config, "--out", out_str], dir.path());
    assert_eq!(output.status.code(), Some(0), "report: {output:?}");
    for name in ["smoke_functionals.svg", "smoke_residuals.svg"] {
        let svg = std::fs::read_to_string(out.join(name)).unwrap();
        assert!(svg.starts_with("<svg"), "{name} is an SVG document");
        assert!(svg.contains("<polyline"), "{name} holds data");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.toml", &base_config("det"));
    for out in ["a", "b"] {
        let output = acns(&["run", "--config", &config, "--out", out], dir.path());
        assert_eq!(output.status.code(), Some(0), "{output:?}");
    }
    for name in ["det.csv", "det_summary.json"] {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical reruns");
    }
}

#[test]
fn output_dir_env_is_respected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.toml", &base_config("env"));
    let output = Command::new(env!("CARGO_BIN_EXE_acns"))
        .args(["check", "--config", &config])
        .current_dir(dir.path())
        .env("OUTPUT_DIR", "from_env")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(dir.path().join("from_env").join("env_hypotheses.json").is_file());
}

#[test]
fn failed_check_gates_run_unless_forced() {
    let dir = tempfile::tempdir().unwrap();
    // Amplitude far beyond the (H4) budget eta * min(mu, 2mu + lambda).
    let text = base_config("hot").replace("amp = 0.002", "amp = 0.4");
    let config = write_config(dir.path(), "run.toml", &text);

    let output = acns(&["check", "--config", &config, "--out", "o"], dir.path());
    assert_eq!(output.status.code(), Some(3), "{output:?}");
    assert!(String::from_utf8_lossy(&output.stderr).contains("H4"));

    let output = acns(&["run", "--config", &config, "--out", "o"], dir.path());
    assert_eq!(output.status.code(), Some(3), "gated run: {output:?}");
    assert!(!dir.path().join("o").join("hot.csv").exists());

    let output = acns(&["run", "--config", &config, "--out", "o", "--force"], dir.path());
    assert_eq!(output.status.code(), Some(0), "forced run: {output:?}");
    assert!(dir.path().join("o").join("hot.csv").is_file());
}

#[test]
fn runtime_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // Strong expansion field drains density at the cell corners; weak pressure
    // and viscosity let it cross the positivity floor before t_end.
    let text = r#"
scenario = "drain"

[grid]
d = 2
n = 16

[law]
a = 0.02
gamma = 2.0
m = 1.0

[viscosity]
mu = 0.01
lambda = 0.0

[tensor]
preset = "zero"

[initial]
kind = "acoustic"
k = 1
eps = -0.6

[solver]
delta = 0.05
t_end = 6.0
cadence_dt = 0.25
rho_floor = 0.3
"#;
    let config = write_config(dir.path(), "run.toml", text);
    let output = acns(&["run", "--config", &config, "--out", "o", "--force"], dir.path());
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("positivity") || stderr.contains("non-finite"),
        "unexpected stderr: {stderr}"
    );
    // Partial outputs still land for post-mortem inspection.
    assert!(dir.path().join("o").join("drain.csv").is_file());
}

#[test]
fn sweep_delta_tabulates_and_parallelizes() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = base_config("cauchy").replace(
        "delta = 0.2        # mollification width",
        "deltas = [0.4, 0.2, 0.1]",
    );
    // The Cauchy window must fit inside this short smoke run.
    text.push_str("\n[sweep]\nt0 = 0.02\n");
    let config = write_config(dir.path(), "run.toml", &text);
    let output =
        acns(&["sweep-delta", "--config", &config, "--out", "o", "--jobs", "3"], dir.path());
    assert_eq!(output.status.code(), Some(0), "{output:?}");

    let out = dir.path().join("o");
    for delta in ["0.4", "0.2", "0.1"] {
        assert!(out.join(format!("cauchy_delta{delta}.csv")).is_file());
    }
    let table = std::fs::read_to_string(out.join("cauchy_sweep.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), "delta_coarse,delta_fine,l2_diff");
    assert_eq!(table.lines().count(), 3, "two consecutive pairs");

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("cauchy_sweep.json")).unwrap())
            .unwrap();
    assert!(summary["failures"].as_array().unwrap().is_empty());
    let pairs = summary["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 2);
    for pair in pairs {
        assert!(pair["l2_diff"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn verify_subcommand_passes() {
    let dir = tempfile::tempdir().unwrap();
    let output = acns(&["verify", "--out", "o"], dir.path());
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.lines().filter(|l| l.starts_with("pass")).count() >= 10);
    assert!(!stdout.contains("FAIL"));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("o").join("verify_report.json")).unwrap(),
    )
    .unwrap();
    assert!(report.as_array().unwrap().iter().all(|c| c["passed"].as_bool().unwrap()));
}
