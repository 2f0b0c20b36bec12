//! End-to-end smoke tests against the compiled binary.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pdqrng"))
}

#[test]
fn print_defaults_round_trips() {
    let out = bin().arg("--print-defaults").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg = pdqrng::config::PipelineConfig::from_toml_str(&text).unwrap();
    cfg.validate().unwrap();
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("help"), "unhelpful message: {err}");
}

#[test]
fn nonexistent_config_is_a_usage_error() {
    let out = bin()
        .args(["--config", "/definitely/not/here.toml", "simulate"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_all_produces_hashed_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.toml");
    let mut cfg = pdqrng::config::PipelineConfig::reference_defaults();
    cfg.run.pulses = 150_000;
    cfg.stats.seq_len = 50_000;
    cfg.drive.duration = 8.0 / cfg.drive.prf;
    cfg.drive.dt = 1e-13;
    std::fs::write(&config_path, cfg.to_toml_string()).unwrap();

    let out = bin()
        .args(["--config"])
        .arg(&config_path)
        .args(["--out-dir"])
        .arg(dir.path())
        .arg("run-all")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("H_exact"), "summary missing: {stdout}");

    for name in [
        "trajectory.csv",
        "pulses.csv",
        "samples.bin",
        "entropy_report.json",
        "bits.bin",
        "battery_report.json",
        "battery_summary.csv",
        "manifest.json",
    ] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    let files = manifest["files"].as_object().unwrap();
    assert_eq!(
        files.len(),
        7,
        "every artifact except the manifest is hashed"
    );

    // staged certify on the samples the run produced agrees with run-all
    let out = bin()
        .args(["--config"])
        .arg(&config_path)
        .args(["--out-dir"])
        .arg(dir.path())
        .arg("certify")
        .arg(dir.path().join("samples.bin"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("entropy_report.json")).unwrap(),
    )
    .unwrap();
    assert!(report["h_exact_bits"].as_f64().unwrap() > 7.0);
}

#[test]
fn fit_verify_reports_conservative_margin() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("fit.toml");
    let trace = Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .join("pdqrng/data/reference_pulse.csv");
    let mut cfg = pdqrng::config::PipelineConfig::reference_defaults();
    cfg.laser.reference_trace = Some(trace);
    std::fs::write(&config_path, cfg.to_toml_string()).unwrap();

    let out = bin()
        .args(["--config"])
        .arg(&config_path)
        .args(["--out-dir"])
        .arg(dir.path())
        .args(["fit", "--verify"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit_report.json")).unwrap())
            .unwrap();
    assert!(report["margin_w"].as_f64().unwrap() >= 0.0);
}
