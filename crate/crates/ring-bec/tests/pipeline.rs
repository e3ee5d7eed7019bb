//! End-to-end command pipelines: exit codes, output files and determinism.

use ring_bec::cli::{self, CommandKind};
use ring_bec::config::RunConfig;
use std::path::Path;

fn config_from(text: &str, out: &Path) -> RunConfig {
    let mut c = RunConfig::from_json(text).unwrap();
    c.out_dir = out.to_path_buf();
    c
}

const SIN_POTENTIALS: &str = r#"
    "potentials": {
        "P": {"kind": "sinusoid", "amplitude": 1.0, "frequency": 1.0, "phase": 0.0},
        "Q": {"kind": "sinusoid", "amplitude": 1.0, "frequency": 1.0, "phase": 0.0}
    }"#;

#[test]
fn profile_pipeline_writes_reports_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_from("{}", dir.path());
    assert_eq!(cli::execute(&config, CommandKind::Profile), cli::EXIT_OK);
    let profile: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("profile.json")).unwrap())
            .unwrap();
    assert!((profile["constants"]["i2"].as_f64().unwrap() - 4.0).abs() < 1e-6);
    assert!((profile["constants"]["i4"].as_f64().unwrap() - 16.0 / 3.0).abs() < 1e-6);
    assert!((profile["constants"]["a"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-6);
    let table = std::fs::read_to_string(dir.path().join("constants.csv")).unwrap();
    assert!(table.starts_with("name,value\n"));
}

#[test]
fn profile_fails_with_unreachable_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = config_from("{}", dir.path());
    config.tolerances.profile_identity = 1e-16;
    assert_eq!(cli::execute(&config, CommandKind::Profile), cli::EXIT_AUDIT);
}

#[test]
fn inadmissible_coupling_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_from(
        r#"{"coupling": {"alpha": 1.0, "gamma": 1.0, "beta": 1.0}}"#,
        dir.path(),
    );
    assert_eq!(cli::execute(&config, CommandKind::Profile), cli::EXIT_CONFIG);
}

#[test]
fn landscape_pipeline_reports_critical_points() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"{{"coupling": {{"epsilon": 1e-4}}, "lambda": 100.0, {SIN_POTENTIALS}}}"#
    );
    let config = config_from(&text, dir.path());
    assert_eq!(cli::execute(&config, CommandKind::Landscape), cli::EXIT_OK);
    let points: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("critical_points.json")).unwrap(),
    )
    .unwrap();
    let list = points["critical_points"].as_array().unwrap();
    assert!(list.len() >= 2);
    let csv = std::fs::read_to_string(dir.path().join("landscape.csv")).unwrap();
    assert!(csv.starts_with("r,m,m_prime\n"));
}

#[test]
fn solve_pipeline_emits_solution_files() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"{{"coupling": {{"epsilon": 1e-4}}, "lambda": 50.0, {SIN_POTENTIALS}}}"#
    );
    let config = config_from(&text, dir.path());
    assert_eq!(cli::execute(&config, CommandKind::Solve), cli::EXIT_OK);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solution.json")).unwrap())
            .unwrap();
    assert!(meta["r_peak"].as_f64().unwrap() > 40.0);
    assert!(meta["mass"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(csv.starts_with("r,u,v\n"));
    assert!(csv.lines().count() > 1000);
}

#[test]
fn solve_without_lambda_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_from(r#"{"coupling": {"epsilon": 1e-4}}"#, dir.path());
    assert_eq!(cli::execute(&config, CommandKind::Solve), cli::EXIT_CONFIG);
}

#[test]
fn audit_pipeline_passes_on_a_converged_ring() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"{{"coupling": {{"epsilon": 1e-4}}, "lambda": 50.0,
            "grid": {{"points_per_width": 14.0, "pad": 15.0, "cap": 2000000}}, {SIN_POTENTIALS}}}"#
    );
    let config = config_from(&text, dir.path());
    assert_eq!(cli::execute(&config, CommandKind::Audit), cli::EXIT_OK);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("audit.json")).unwrap())
            .unwrap();
    // every emitted number carries its anchor
    let entries = report["entries"].as_array().unwrap();
    assert!(entries.iter().all(|e| e["anchor"].is_string()));
    assert!(report["energy_residual"].as_f64().unwrap() < 1e-3);
}

#[test]
fn reduce_pipeline_reports_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"{{"coupling": {{"epsilon": 1e-4}}, "lambda": 50.0, {SIN_POTENTIALS}}}"#
    );
    let config = config_from(&text, dir.path());
    assert_eq!(cli::execute(&config, CommandKind::Reduce), cli::EXIT_OK);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("reduction.json")).unwrap())
            .unwrap();
    assert!(report["l_norm"].as_f64().unwrap() > 0.0);
    assert!(report["coercivity"].as_f64().unwrap() > 0.1);
}

#[test]
fn sweep_outputs_are_byte_identical_across_runs() {
    let text = format!(
        r#"{{"coupling": {{"epsilon": 1e-4}}, "sweep_lambdas": [36.0, 50.0], {SIN_POTENTIALS}}}"#
    );
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let config = config_from(&text, dir.path());
        assert_eq!(cli::execute(&config, CommandKind::Sweep), cli::EXIT_OK);
    }
    for name in ["audit_sweep.csv", "reduction_sweep.csv", "sweep.json"] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    // format contract: one row per multiplier plus header and slope footer
    let csv = std::fs::read_to_string(dir_a.path().join("audit_sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("lambda,"));
    assert!(lines[3].starts_with("slope,"));
    // 17 significant digits with '.' decimals
    assert!(lines[1].contains('e') && lines[1].contains('.'));
}

#[test]
fn normalize_pipeline_meets_the_mass_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"{{"coupling": {{"epsilon": 3e-4}}, {SIN_POTENTIALS}}}"#
    );
    let config = config_from(&text, dir.path());
    assert_eq!(cli::execute(&config, CommandKind::Normalize), cli::EXIT_OK);
    let out: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("normalized.json")).unwrap(),
    )
    .unwrap();
    assert!(out["mass_error"].as_f64().unwrap() <= 1e-8);
    assert!(out["lambda_in_bracket"].as_bool().unwrap());
}
