use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn qbath(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbath"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("QBATH_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn usage_errors_exit_64() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(qbath(d.path(), &["frobnicate"]).status.code(), Some(64));
    assert_eq!(qbath(d.path(), &["simulate", "--no-such-flag"]).status.code(), Some(64));
    assert_eq!(qbath(d.path(), &["simulate", "--method", "magic"]).status.code(), Some(64));
}

#[test]
fn bad_config_exits_65() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("bad.json");
    std::fs::write(&cfg, r#"{"t_max_fs": "long"}"#).unwrap();
    let o = qbath(d.path(), &["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(o.status.code(), Some(65));
    let o = qbath(d.path(), &["simulate", "--initial", "site:99"]);
    assert_eq!(o.status.code(), Some(65));
    let o = qbath(d.path(), &["environment", "--site", "atlantis"]);
    assert_eq!(o.status.code(), Some(65));
}

#[test]
fn simulate_writes_headed_csv_and_manifest() {
    let d = tempfile::tempdir().unwrap();
    let o = qbath(d.path(), &["simulate", "--method", "redfield", "--t-max", "100"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("trajectory.csv")).unwrap();
    let first = csv.lines().next().unwrap();
    assert!(first.starts_with("# tool=qbath version=") && first.contains("config_hash="));
    let m = manifest(d.path());
    let body = &m["body"];
    assert_eq!(body["subcommand"], "simulate");
    for entry in body["outputs"].as_array().unwrap() {
        let bytes = std::fs::read(d.path().join(entry["file"].as_str().unwrap())).unwrap();
        assert_eq!(hex::encode(Sha256::digest(&bytes)), entry["sha256"].as_str().unwrap());
    }
    assert!(m["header"].as_str().unwrap().contains(body["config_hash"].as_str().unwrap()));
}

#[test]
fn metrics_writes_one_file_per_metric() {
    let d = tempfile::tempdir().unwrap();
    let o = qbath(d.path(), &["metrics", "--method", "redfield", "--t-max", "50", "--metrics", "purity,l1_coherence,qfi"]);
    assert!(o.status.success());
    for m in ["purity", "l1_coherence", "qfi"] {
        assert!(d.path().join(format!("metric_{m}.csv")).exists());
    }
    assert!(d.path().join("etr.json").exists());
    assert_eq!(qbath(d.path(), &["metrics", "--metrics", "nonsense"]).status.code(), Some(65));
}

#[test]
fn outputs_are_deterministic_per_seed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = qbath(d.path(), &["--seed", "7", "optimize", "--population", "8", "--generations", "2"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["front.csv", "front.json", "named_configs.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    assert_eq!(manifest(a.path())["body"]["seed"], 7);
}

#[test]
fn environment_all_sites() {
    let d = tempfile::tempdir().unwrap();
    let o = qbath(d.path(), &["environment", "--site", "all"]);
    assert!(o.status.success());
    let ledgers = std::fs::read_dir(d.path()).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("ledger_")).count();
    assert_eq!(ledgers, 9);
    let summary = std::fs::read_to_string(d.path().join("environment_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2 + 9);
}

#[test]
fn ecodesign_and_spectrum_run() {
    let d = tempfile::tempdir().unwrap();
    let o = qbath(d.path(), &["ecodesign"]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("unreconciled vs paper 101.5"));
    let o = qbath(d.path(), &["spectrum"]);
    assert!(o.status.success());
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("spectrum_summary.json")).unwrap()).unwrap();
    assert!((s["body"]["integral_w_m2"].as_f64().unwrap() - 1000.0).abs() < 10.0);
}

#[test]
fn validate_exit_code_reflects_results() {
    let d = tempfile::tempdir().unwrap();
    let o = qbath(d.path(), &["validate", "--quick", "--tests", "5,6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(d.path().join("report.json").exists() && d.path().join("report.txt").exists());
    let cfg = d.path().join("leak.json");
    std::fs::write(&cfg, r#"{"validation": {"trace_leak": 1e-9}}"#).unwrap();
    let o = qbath(d.path(), &["--config", cfg.to_str().unwrap(), "validate", "--tests", "5"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.path().join("report.json").exists());
}

#[test]
fn output_dir_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qbath"))
        .args(["ecodesign"])
        .env("QBATH_OUTPUT_DIR", d.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(d.path().join("reactivity.json").exists());
}
