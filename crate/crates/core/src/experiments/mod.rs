//! Seeded Monte Carlo campaigns and exact tables, with reproducible CSV
//! output and a JSON manifest per run.
//!
//! Every trial draws its randomness from [`derive_seed`]`(base_seed,
//! grid_index, trial_index)`, trials run in parallel and results are
//! collected in `(grid_index, trial_index)` order, so the CSV bytes depend
//! only on the configuration.

mod config;
mod curves;
mod pe_sweep;
mod second_mom;
mod stylized;

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{
    derive_seed, sweep_geometry, CodeSpec, ExperimentConfig, ExperimentKind, PointSpec, SeedLedger, StylizedSpec,
    SECOND_MOM_MAX_CODEWORDS, SEED_ALGORITHM,
};
pub use curves::{emit_rate_curves, ld_rate_table, run_ld_rate, run_rate_curves, LdRateRow, RateCurveRow};
pub use pe_sweep::{draw_source, run_pe_sweep, PeRow, PeSweepReport, TrialRecord, SOURCE_STREAM};
pub use second_mom::{constant_target, run_second_mom, EstimateStatus, SecondMomRow, MIN_ACCEPTED};
pub use stylized::{run_stylized, StylizedRow};

use crate::error::{Error, Result};
use crate::sparc::COLUMN_STREAM_ALGORITHM;

/// Result of one campaign.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentReport {
    PeSweep(PeSweepReport),
    SecondMom(Vec<SecondMomRow>),
    Stylized(Vec<StylizedRow>),
    LdRate(Vec<LdRateRow>),
    RateCurves(Vec<RateCurveRow>),
}

/// Validates `config` and runs the campaign it names.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    Ok(match config.kind {
        ExperimentKind::PeSweep => ExperimentReport::PeSweep(run_pe_sweep(config)?),
        ExperimentKind::SecondMom => ExperimentReport::SecondMom(run_second_mom(config)?),
        ExperimentKind::Stylized => ExperimentReport::Stylized(run_stylized(config)?),
        ExperimentKind::LdRate => ExperimentReport::LdRate(run_ld_rate(config)?),
        ExperimentKind::RateCurves => ExperimentReport::RateCurves(run_rate_curves(config)?),
    })
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| Error::Internal(e.to_string()))
}

impl ExperimentReport {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            ExperimentReport::PeSweep(_) => ExperimentKind::PeSweep,
            ExperimentReport::SecondMom(_) => ExperimentKind::SecondMom,
            ExperimentReport::Stylized(_) => ExperimentKind::Stylized,
            ExperimentReport::LdRate(_) => ExperimentKind::LdRate,
            ExperimentReport::RateCurves(_) => ExperimentKind::RateCurves,
        }
    }

    /// `(file name, CSV bytes)` for every table; the summary table comes
    /// first.
    pub fn csv_tables(&self) -> Result<Vec<(String, Vec<u8>)>> {
        let name = self.kind().as_str();
        Ok(match self {
            ExperimentReport::PeSweep(r) => {
                vec![(format!("{name}.csv"), to_csv(&r.rows)?), (format!("{name}_trials.csv"), to_csv(&r.trials)?)]
            }
            ExperimentReport::SecondMom(r) => vec![(format!("{name}.csv"), to_csv(r)?)],
            ExperimentReport::Stylized(r) => vec![(format!("{name}.csv"), to_csv(r)?)],
            ExperimentReport::LdRate(r) => vec![(format!("{name}.csv"), to_csv(r)?)],
            ExperimentReport::RateCurves(r) => vec![(format!("{name}.csv"), to_csv(r)?)],
        })
    }

    /// The summary CSV rendered as an aligned text table.
    pub fn summary_table(&self) -> Result<String> {
        let (_, bytes) = self.csv_tables()?.into_iter().next().expect("at least one table");
        let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(&bytes[..]);
        let rows: Vec<Vec<String>> = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<_, _>>()?;
        let cols = rows.first().map_or(0, Vec::len);
        let widths: Vec<usize> = (0..cols)
            .map(|c| rows.iter().map(|r| r.get(c).map_or(0, |s| s.chars().count())).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &rows {
            let line: Vec<String> = row.iter().zip(&widths).map(|(s, &w)| format!("{s:>w$}")).collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        Ok(out)
    }
}

/// Sidecar record of a run. Only `runtime_ms` varies between identical
/// runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: ExperimentKind,
    pub config_sha256: String,
    pub artifact_version: String,
    pub seed_algorithm: String,
    pub column_stream_algorithm: String,
    pub outputs: Vec<String>,
    pub runtime_ms: f64,
    pub config: ExperimentConfig,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Runs `config` and writes its CSV tables plus `manifest.json` into `dir`.
pub fn run_to_dir(config: &ExperimentConfig, dir: &Path) -> Result<(ExperimentReport, Manifest)> {
    let started = Instant::now();
    let report = run_experiment(config)?;
    let tables = report.csv_tables()?;
    let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    fs::create_dir_all(dir)?;
    for (name, bytes) in &tables {
        fs::write(dir.join(name), bytes)?;
    }
    let manifest = Manifest {
        kind: config.kind,
        config_sha256: config.sha256(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        seed_algorithm: SEED_ALGORITHM.to_string(),
        column_stream_algorithm: COLUMN_STREAM_ALGORITHM.to_string(),
        outputs: tables.into_iter().map(|(name, _)| name).collect(),
        runtime_ms,
        config: config.clone(),
    };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_vec_pretty(&manifest)?)?;
    Ok((report, manifest))
}
