//! Pilot runs used to calibrate the frozen thresholds of the encoder and
//! Monte Carlo acceptance checks. Prints each summary table.
//!
//! `cargo run --release -p sparc-core --example pilot [config.json|toml ...]`

use std::path::Path;
use std::time::Instant;

use sparc_core::experiments::{run_experiment, ExperimentConfig};

const DEFAULT: &str = r#"{
  "kind": "pe_sweep", "trials": 200, "base_seed": 20240601,
  "grid": [0.0, 0.1, 0.2079441541679836, 0.3, 0.4, 0.5, 0.62, 0.65],
  "code": {"n": 20, "L": 2},
  "point": {"sigma2": 1.0, "D": 0.8, "gamma2": 2.0}
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let configs = if args.is_empty() {
        vec![ExperimentConfig::from_json(DEFAULT)?]
    } else {
        args.iter().map(|p| ExperimentConfig::from_path(Path::new(p))).collect::<Result<_, _>>()?
    };
    for config in configs {
        let started = Instant::now();
        let report = run_experiment(&config)?;
        println!("{} ({:.1} s)", config.kind.as_str(), started.elapsed().as_secs_f64());
        print!("{}", report.summary_table()?);
    }
    Ok(())
}
