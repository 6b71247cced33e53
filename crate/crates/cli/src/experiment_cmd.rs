use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde_json::json;
use sparc_core::experiments::{emit_rate_curves, run_to_dir, ExperimentConfig, MANIFEST_FILE};
use sparc_core::Error;

use crate::{announce, Globals};

/// Output directory used when `--out` is not given.
const DEFAULT_EXPERIMENT_DIR: &str = "sparc-out";

#[derive(Debug, Args)]
pub struct CurvesArgs {
    /// Source variance
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// Comma-separated D/sigma2 values in (0, 1)
    #[arg(long, value_delimiter = ',', default_values_t = default_ratio_grid())]
    pub grid: Vec<f64>,
}

fn default_ratio_grid() -> Vec<f64> {
    (1..20).map(|k| k as f64 / 20.0).collect()
}

pub fn run_experiment(g: &Globals) -> Result<(), Error> {
    let path = g.config.as_ref().ok_or_else(|| Error::Config(vec!["--config is required".into()]))?;
    let config = ExperimentConfig::from_path(path)?;
    config.validate()?;
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_EXPERIMENT_DIR));
    announce(
        "experiment",
        &json!({"config": serde_json::to_value(&config)?, "config_sha256": config.sha256(), "out": dir}),
    );
    let (report, manifest) = run_to_dir(&config, &dir)?;
    print!("{}", report.summary_table()?);
    println!();
    for name in &manifest.outputs {
        println!("wrote {}", dir.join(name).display());
    }
    println!("wrote {}", dir.join(MANIFEST_FILE).display());
    Ok(())
}

pub fn run_curves(args: &CurvesArgs, g: &Globals) -> Result<(), Error> {
    announce("curves", &json!({"sigma2": args.sigma2, "grid": args.grid, "units": g.units(), "seed": g.seed}));
    let d_grid: Vec<f64> = args.grid.iter().map(|r| r * args.sigma2).collect();
    let rows = emit_rate_curves(args.sigma2, &d_grid)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["d_over_sigma2", "D", "R_star", "R0", "gap", "units"])?;
    for row in rows {
        w.write_record([
            row.d_over_sigma2.to_string(),
            row.d.to_string(),
            g.rate(row.r_star).to_string(),
            g.rate(row.r0).to_string(),
            g.rate(row.gap).to_string(),
            g.units().to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    match &g.out {
        Some(path) => fs::write(path, bytes)?,
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(())
}
