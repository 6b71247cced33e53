use sparc_core::experiments::{run_experiment, run_to_dir, ExperimentConfig, ExperimentKind, MANIFEST_FILE};
use sparc_core::Error;

const SWEEP: &str = r#"{
  "kind": "pe_sweep", "trials": 12, "base_seed": 4, "grid": [0.0, 0.2, 0.4],
  "code": {"n": 12, "L": 2}, "point": {"sigma2": 1.0, "D": 0.8, "gamma2": 2.0}
}"#;

fn tables(config: &ExperimentConfig) -> Vec<(String, Vec<u8>)> {
    run_experiment(config).unwrap().csv_tables().unwrap()
}

#[test]
fn csv_output_is_reproducible() {
    let config = ExperimentConfig::from_json(SWEEP).unwrap();
    let first = tables(&config);
    assert_eq!(first, tables(&config));
    let names: Vec<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["pe_sweep.csv", "pe_sweep_trials.csv"]);
}

#[test]
fn base_seed_changes_the_trials() {
    let config = ExperimentConfig::from_json(SWEEP).unwrap();
    let mut other = config.clone();
    other.base_seed += 1;
    assert_ne!(config.sha256(), other.sha256());
    assert_ne!(tables(&config)[1].1, tables(&other)[1].1);
}

#[test]
fn json_and_toml_configs_agree() {
    let json = ExperimentConfig::from_json(SWEEP).unwrap();
    let toml = ExperimentConfig::from_toml(
        r#"
        kind = "pe_sweep"
        trials = 12
        base_seed = 4
        grid = [0.0, 0.2, 0.4]
        [code]
        n = 12
        L = 2
        [point]
        sigma2 = 1.0
        D = 0.8
        gamma2 = 2.0
        "#,
    )
    .unwrap();
    assert_eq!(json, toml);
    assert_eq!(json.sha256(), toml.sha256());
}

#[test]
fn invalid_configs_list_every_problem() {
    let err = ExperimentConfig::from_json(
        r#"{"kind": "pe_sweep", "trials": 0, "base_seed": 1, "grid": [0.1], "code": {"n": 12, "L": 2, "M": 4}}"#,
    )
    .and_then(|c| c.validate())
    .unwrap_err();
    let Error::Config(problems) = err else { panic!("expected a config error, got {err}") };
    for field in ["trials", "point.D", "point.gamma2", "code.M"] {
        assert!(problems.iter().any(|p| p.starts_with(field)), "{field} not reported in {problems:?}");
    }
    assert!(ExperimentConfig::from_json(
        r#"{"kind": "stylized", "trials": 1, "base_seed": 1, "grid": [1], "bogus": 1}"#
    )
    .is_err());
}

#[test]
fn run_to_dir_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config =
        ExperimentConfig::from_json(r#"{"kind": "ld_rate", "trials": 1, "base_seed": 0, "grid": [2.0]}"#).unwrap();
    let (_, manifest) = run_to_dir(&config, dir.path()).unwrap();
    assert_eq!(manifest.kind, ExperimentKind::LdRate);
    assert_eq!(manifest.outputs, ["ld_rate.csv"]);
    let text = std::fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
    let round: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(round["config_sha256"], config.sha256());
    assert!(dir.path().join("ld_rate.csv").exists());
}

#[test]
fn shipped_configs_validate() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let config = ExperimentConfig::from_path(&path).unwrap();
        config.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert_eq!(seen, 5);
}
