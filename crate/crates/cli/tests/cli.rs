use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sparc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparc")).args(args).output().expect("spawn sparc")
}

fn json_stdout(args: &[&str]) -> Value {
    let out = sparc(args);
    assert!(out.status.success(), "sparc {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).expect("golden file")
}

#[test]
fn top_level_help_matches_golden() {
    let out = sparc(&["--help"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("help.txt"));
}

#[test]
fn encode_help_matches_golden() {
    let out = sparc(&["encode", "--help"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("encode_help.txt"));
}

#[test]
fn theory_xstar() {
    let v = json_stdout(&["theory", "--op", "xstar"]);
    assert_eq!(v["op"], "xstar");
    assert!((v["value"].as_f64().unwrap() - 0.203).abs() < 1e-3);
}

#[test]
fn theory_f_half_ln_two() {
    let v = json_stdout(&["theory", "--op", "f", "--x", "1", "--y", "0.5", "--z", "0.5"]);
    assert!((v["value"].as_f64().unwrap() - 0.5 * 2f64.ln()).abs() < 1e-12);
    assert_eq!(v["inputs"]["x"], 1.0);
}

#[test]
fn theory_f_vanishes_beyond_sum() {
    let v = json_stdout(&["theory", "--op", "f", "--x", "1", "--y", "0.5", "--z", "1.6"]);
    assert_eq!(v["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn theory_bits_flag_converts_rates() {
    let v = json_stdout(&["--bits", "theory", "--op", "shannon", "--d", "0.25"]);
    assert_eq!(v["units"], "bits");
    assert!((v["value"]["R_star"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn theory_panel_has_alpha_grid() {
    let v = json_stdout(&["theory", "--all", "--d", "0.5", "--r", "1.0", "--sections", "8", "--b", "3"]);
    assert_eq!(v["value"]["alpha_grid"].as_array().unwrap().len(), 8);
}

#[test]
fn domain_errors_exit_with_two() {
    let out = sparc(&["theory", "--op", "f", "--x", "-1", "--y", "1", "--z", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain error"));
    let out = sparc(&["theory", "--op", "f", "--x", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sparc(&["experiment"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_errors_exit_with_three() {
    let out = sparc(&[
        "--budget",
        "1000",
        "encode",
        "--generate",
        "20",
        "1",
        "5",
        "--sections",
        "4",
        "--columns",
        "100",
        "--d",
        "0.8",
        "--gamma2",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the budget"));
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let outcome = dir.path().join("outcome.json");
    let source = dir.path().join("source.csv");
    let recon = dir.path().join("recon.bin");
    std::fs::write(&source, (0..20).map(|i| format!("{}\n", ((i * 7 % 11) as f64 - 5.0) / 3.0)).collect::<String>())
        .unwrap();
    let enc = json_stdout(&[
        "--seed",
        "3",
        "--out",
        outcome.to_str().unwrap(),
        "encode",
        "--source",
        source.to_str().unwrap(),
        "--sections",
        "2",
        "--columns",
        "8",
        "--d",
        "0.8",
        "--gamma2",
        "2",
    ]);
    assert_eq!(enc["status"], "coded");
    assert_eq!(enc["payload_bits"]["total"], 5 + 6);
    let dec = json_stdout(&[
        "--out",
        recon.to_str().unwrap(),
        "decode",
        "--outcome",
        outcome.to_str().unwrap(),
        "--source",
        source.to_str().unwrap(),
    ]);
    assert_eq!(dec["distortion_total"].as_f64().unwrap(), enc["distortion_total"].as_f64().unwrap());
    assert_eq!(std::fs::read(&recon).unwrap().len(), 20 * 8);
}

#[test]
fn low_power_source_is_trivial_zero() {
    let dir = tempfile::tempdir().unwrap();
    let source = dir.path().join("quiet.csv");
    std::fs::write(&source, "0.1\n-0.2\n0.3\n0.0\n").unwrap();
    let enc = json_stdout(&[
        "encode",
        "--source",
        source.to_str().unwrap(),
        "--sections",
        "2",
        "--columns",
        "2",
        "--d",
        "0.5",
        "--gamma2",
        "2",
    ]);
    assert_eq!(enc["status"], "trivial_zero");
    assert_eq!(enc["payload_bits"]["total"], 0);
    assert!(enc["beta_hat"].is_null());
}

#[test]
fn encoding_is_deterministic() {
    let args = [
        "--seed",
        "9",
        "encode",
        "--generate",
        "24",
        "1",
        "4",
        "--rate",
        "0.3",
        "--b",
        "1.5",
        "--d",
        "0.7",
        "--gamma2",
        "2",
    ];
    let first = sparc(&args);
    let second = sparc(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn census_writes_bucket_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("buckets.csv");
    let v = json_stdout(&[
        "--seed",
        "3",
        "--out",
        table.to_str().unwrap(),
        "census",
        "--generate",
        "20",
        "1",
        "5",
        "--sections",
        "2",
        "--columns",
        "8",
        "--d",
        "0.8",
        "--gamma2",
        "2",
    ]);
    let x = v["census"]["X"].as_u64().unwrap();
    let buckets: u64 = v["census"]["by_overlap"].as_object().unwrap().values().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(x, buckets);
    let text = std::fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("r,alpha,count,census,ratio_to_EXref\n"));
    assert_eq!(text.lines().count(), 1 + 3);
}

#[test]
fn experiment_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("curves.json");
    std::fs::write(&config, r#"{"kind": "rate_curves", "trials": 1, "base_seed": 0, "grid": [0.25, 0.5]}"#).unwrap();
    let out_dir = dir.path().join("run");
    let out = sparc(&["--config", config.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "experiment"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("rate_curves.csv").exists());
    let manifest: Value = serde_json::from_slice(&std::fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["kind"], "rate_curves");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn curves_emit_csv() {
    let out = sparc(&["curves", "--grid", "0.1,0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d_over_sigma2,D,R_star,R0,gap,units");
    assert_eq!(lines.len(), 3);
}
