use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::census::{count_overlap_solutions, expected_solutions_bounds, is_eps_good, ExRefSource, SolutionCensus};
use crate::error::{Error, Result};
use crate::numeric::{wilson_interval, Z95};
use crate::sparc::{
    check_codebook_budget, distortion_slack, encode_with_trace, quantizer_level, triangle_chain, CodecSettings,
    DesignMatrix, EncodeStatus, SparcParams,
};
use crate::theory::TheoryPoint;

use super::config::{sweep_geometry, ExperimentConfig, ExperimentKind, SeedLedger};

/// Stream index of the source block, disjoint from every column stream.
pub const SOURCE_STREAM: u64 = u64::MAX;

/// I.i.d. `N(0, σ²)` source block for a trial seed.
pub fn draw_source(seed: u64, n: usize, sigma2: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SOURCE_STREAM);
    let sd = sigma2.sqrt();
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sd * z
        })
        .collect()
}

/// One encoder trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub grid_index: usize,
    pub trial_index: u64,
    pub seed: u64,
    pub grid_value: f64,
    pub status: EncodeStatus,
    pub distortion_total: Option<f64>,
    pub distortion_tilde: Option<f64>,
    /// Number of solutions for `S̃` in this codebook (coded trials).
    #[serde(rename = "X")]
    pub x: Option<u64>,
    /// ε-goodness of `β̂` against the theoretical upper bound on `E X`,
    /// when `β̂` is a solution.
    pub eps_good: Option<bool>,
    pub triangle_ok: Option<bool>,
    /// Wall-clock time; kept out of CSV output.
    #[serde(skip)]
    pub runtime_ms: f64,
}

/// Aggregate for one grid rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeRow {
    pub grid_value: f64,
    #[serde(rename = "L")]
    pub sections: usize,
    #[serde(rename = "M")]
    pub columns: usize,
    #[serde(rename = "R_actual")]
    pub rate_actual: f64,
    pub trials: u64,
    pub overflow: u64,
    pub trivial_zero: u64,
    pub coded: u64,
    pub errors_strict: u64,
    pub pe_strict: f64,
    pub ci95_lo_strict: f64,
    pub ci95_hi_strict: f64,
    pub slack: f64,
    pub errors_slack: u64,
    pub pe_slack: f64,
    pub ci95_lo_slack: f64,
    pub ci95_hi_slack: f64,
    pub triangle_violations: u64,
}

impl PeRow {
    pub fn success_slack(&self) -> f64 {
        1.0 - self.pe_slack
    }

    pub fn ci95_halfwidth_slack(&self) -> f64 {
        0.5 * (self.ci95_hi_slack - self.ci95_lo_slack)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeSweepReport {
    pub rows: Vec<PeRow>,
    pub trials: Vec<TrialRecord>,
}

impl PeSweepReport {
    /// Indices `k` where the slack-adjusted error rate rises from grid
    /// point `k` to `k + 1` by more than twice the larger 95% half-width.
    pub fn monotonicity_violations(&self) -> Vec<usize> {
        self.rows
            .windows(2)
            .enumerate()
            .filter(|(_, w)| {
                let tol = 2.0 * w[0].ci95_halfwidth_slack().max(w[1].ci95_halfwidth_slack());
                w[1].pe_slack > w[0].pe_slack + tol
            })
            .map(|(k, _)| k)
            .collect()
    }
}

/// Status, total and rescaled distortion, solution count, ε-goodness and
/// triangle-chain verdict of one trial.
type TrialOutcome = (EncodeStatus, Option<f64>, Option<f64>, Option<u64>, Option<bool>, Option<bool>);

fn run_trial(params: &SparcParams, settings: &CodecSettings, sigma2: f64, eps: f64, seed: u64) -> Result<TrialOutcome> {
    let a = DesignMatrix::sample(params, seed)?;
    let source = draw_source(seed, params.n, sigma2);
    let trace = encode_with_trace(&source, &a, params, settings)?;
    let out = &trace.outcome;
    let (mut x, mut eps_good, mut tri) = (None, None, None);
    if let (Some(s_tilde), Some(beta)) = (trace.s_tilde.as_ref(), out.beta_hat.as_ref()) {
        let buckets = count_overlap_solutions(s_tilde, &a, settings.d, out.coeff, beta, settings.budget)?;
        let total: u64 = buckets.iter().sum();
        x = Some(total);
        let q = quantizer_level(out.q_index.expect("coded"), settings.d, settings.gamma2, params.n);
        let point = TheoryPoint::conditional(q, settings.d, params.rate_actual)?;
        let ex_ref = expected_solutions_bounds(&point, params.n, 1.0)?.ln_upper.exp();
        let census = SolutionCensus {
            x: total,
            by_overlap: buckets.into_iter().enumerate().map(|(r, c)| (r as u32, c)).collect(),
            reference_beta: beta.clone(),
            ex_ref,
            ex_ref_source: ExRefSource::TheoryUpperBound,
        };
        if census.reference_is_solution() && ex_ref > 0.0 {
            eps_good = Some(is_eps_good(&census, eps)?);
        }
        tri = triangle_chain(&source, &trace, settings).map(|c| c.holds());
    }
    Ok((out.status, out.distortion_total, out.distortion_tilde, x, eps_good, tri))
}

/// Empirical excess-distortion probability across a grid of rates.
///
/// A trial is an error under the strict criterion if it overflows or
/// `|S − Ŝ|² > D`, and under the slack criterion if it overflows or
/// `|S − Ŝ|² > D + κ₁/n² + κ₂√D/n`.
pub fn run_pe_sweep(config: &ExperimentConfig) -> Result<PeSweepReport> {
    if config.kind != ExperimentKind::PeSweep {
        return Err(Error::Config(vec![format!("kind: expected pe_sweep, got {}", config.kind.as_str())]));
    }
    config.validate()?;
    let code = config.code.expect("validated");
    let (d, gamma2) = (config.point.d.expect("validated"), config.point.gamma2.expect("validated"));
    let settings = CodecSettings::new(d, gamma2)?.with_budget(config.budget);
    let geometries =
        config.grid.iter().map(|&r| sweep_geometry(code.n, code.sections, r)).collect::<Result<Vec<_>>>()?;
    for p in &geometries {
        check_codebook_budget(p.sections, p.columns, config.budget)?;
    }
    let ledger = SeedLedger::new(config.base_seed, config.grid.len(), config.trials)?;
    let slack = distortion_slack(code.n, d, gamma2);

    let mut rows = Vec::with_capacity(geometries.len());
    let mut all_trials = Vec::with_capacity(geometries.len() * config.trials as usize);
    for (g, params) in geometries.iter().enumerate() {
        let grid_value = config.grid[g];
        let records = ledger
            .row(g)
            .par_iter()
            .enumerate()
            .map(|(t, &seed)| {
                let started = Instant::now();
                let (status, total, tilde, x, eps_good, tri) =
                    run_trial(params, &settings, config.point.sigma2, config.eps, seed)?;
                Ok(TrialRecord {
                    grid_index: g,
                    trial_index: t as u64,
                    seed,
                    grid_value,
                    status,
                    distortion_total: total,
                    distortion_tilde: tilde,
                    x,
                    eps_good,
                    triangle_ok: tri,
                    runtime_ms: started.elapsed().as_secs_f64() * 1e3,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(aggregate(grid_value, params, &records, d, slack));
        all_trials.extend(records);
    }
    Ok(PeSweepReport { rows, trials: all_trials })
}

fn aggregate(grid_value: f64, params: &SparcParams, records: &[TrialRecord], d: f64, slack: f64) -> PeRow {
    let count = |pred: &dyn Fn(&TrialRecord) -> bool| records.iter().filter(|r| pred(r)).count() as u64;
    let trials = records.len() as u64;
    let overflow = count(&|r| r.status == EncodeStatus::NormOverflow);
    let errors_above = |limit: f64| count(&|r| r.distortion_total.is_none_or(|v| v > limit));
    let errors_strict = errors_above(d);
    let errors_slack = errors_above(d + slack);
    let (lo_s, hi_s) = wilson_interval(errors_strict, trials, Z95);
    let (lo_k, hi_k) = wilson_interval(errors_slack, trials, Z95);
    PeRow {
        grid_value,
        sections: params.sections,
        columns: params.columns,
        rate_actual: params.rate_actual,
        trials,
        overflow,
        trivial_zero: count(&|r| r.status == EncodeStatus::TrivialZero),
        coded: count(&|r| r.status == EncodeStatus::Coded),
        errors_strict,
        pe_strict: errors_strict as f64 / trials as f64,
        ci95_lo_strict: lo_s,
        ci95_hi_strict: hi_s,
        slack,
        errors_slack,
        pe_slack: errors_slack as f64 / trials as f64,
        ci95_lo_slack: lo_k,
        ci95_hi_slack: hi_k,
        triangle_violations: count(&|r| r.triangle_ok == Some(false)),
    }
}
