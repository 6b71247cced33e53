use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theory::{
    stylized_cond_dist, stylized_ln_mean, stylized_ratio, stylized_regime, StylizedParams, StylizedRegime,
};

use super::config::{ExperimentConfig, ExperimentKind, SeedLedger};
use super::second_mom::{EstimateStatus, MIN_ACCEPTED};

/// Empirical two-type model against its closed forms. Every `*_z` field is
/// the deviation in units of the standard error implied by the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StylizedRow {
    pub p: f64,
    pub n: f64,
    pub regime: StylizedRegime,
    pub case: u8,
    pub trials: u64,
    pub type2_freq: f64,
    pub type2_expected: f64,
    pub type2_z: f64,
    pub mean_hat: f64,
    pub mean_closed: f64,
    pub mean_z: f64,
    /// Trials with `U₁ = 1`.
    pub accepted: u64,
    pub ratio_hat: f64,
    pub ratio_closed: f64,
    pub ratio_se: f64,
    pub ratio_z: f64,
    /// `P(X = e^{2n} | U₁ = 1)`.
    pub p_large_hat: f64,
    pub p_large_closed: f64,
    pub p_large_se: f64,
    pub p_large_z: f64,
    pub within_3sigma: bool,
    pub status: EstimateStatus,
}

/// `(type 2?, U₁)` for one draw of the model.
fn draw(seed: u64, params: &StylizedParams) -> (bool, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let type2 = rng.random::<f64>() < (-params.n * params.p).exp();
    let ln_solutions = if type2 { 2.0 * params.n } else { params.n };
    let u1 = rng.random::<f64>() < (ln_solutions - params.ln_configs).exp();
    (type2, u1)
}

fn z_score(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if se > 0.0 {
        diff / se
    } else {
        f64::INFINITY
    }
}

pub fn run_stylized(config: &ExperimentConfig) -> Result<Vec<StylizedRow>> {
    if config.kind != ExperimentKind::Stylized {
        return Err(Error::Config(vec![format!("kind: expected stylized, got {}", config.kind.as_str())]));
    }
    config.validate()?;
    let n = config.stylized.expect("validated").n;
    let ledger = SeedLedger::new(config.base_seed, config.grid.len(), config.trials)?;
    config
        .grid
        .iter()
        .enumerate()
        .map(|(g, &p)| {
            let params = StylizedParams::new(n, p)?;
            let draws: Vec<(bool, bool)> = ledger.row(g).par_iter().map(|&s| draw(s, &params)).collect();
            Ok(summarize(&params, &draws))
        })
        .collect()
}

fn summarize(params: &StylizedParams, draws: &[(bool, bool)]) -> StylizedRow {
    let StylizedParams { n, p, .. } = *params;
    let (small, large) = (n.exp(), (2.0 * n).exp());
    let trials = draws.len() as u64;
    let tf = trials as f64;
    let type2 = draws.iter().filter(|d| d.0).count() as u64;
    let accepted = draws.iter().filter(|d| d.1).count() as u64;
    let accepted_large = draws.iter().filter(|d| d.0 && d.1).count() as u64;

    let q = (-n * p).exp();
    let type2_freq = type2 as f64 / tf;
    let type2_se = (q * (1.0 - q) / tf).sqrt();

    let mean_closed = stylized_ln_mean(params).exp();
    let mean_hat = (type2 as f64 * large + (trials - type2) as f64 * small) / tf;
    let spread = large - small;
    let mean_se = (q * (1.0 - q)).sqrt() * spread / tf.sqrt();

    let cond = stylized_cond_dist(params);
    let ratio_closed = stylized_ratio(params);
    let af = accepted as f64;
    let (p_large_hat, cond_mean_hat) = if accepted > 0 {
        let pl = accepted_large as f64 / af;
        (pl, pl * large + (1.0 - pl) * small)
    } else {
        (f64::NAN, f64::NAN)
    };
    let p_large_se = (cond.p_large * cond.p_small / af).sqrt();
    let ratio_hat = cond_mean_hat / mean_hat;
    // delta method with model variances: se of E[X|U₁=1] is se(p_large)·spread
    let cond_mean_closed = ratio_closed * mean_closed;
    let ratio_se = ((p_large_se * spread / mean_closed).powi(2)
        + (cond_mean_closed * mean_se / mean_closed.powi(2)).powi(2))
    .sqrt();

    let type2_z = z_score(type2_freq - q, type2_se);
    let mean_z = z_score(mean_hat - mean_closed, mean_se);
    let ratio_z = z_score(ratio_hat - ratio_closed, ratio_se);
    let p_large_z = z_score(p_large_hat - cond.p_large, p_large_se);
    let regime = stylized_regime(p);
    StylizedRow {
        p,
        n,
        regime,
        case: regime.case_number(),
        trials,
        type2_freq,
        type2_expected: q,
        type2_z,
        mean_hat,
        mean_closed,
        mean_z,
        accepted,
        ratio_hat,
        ratio_closed,
        ratio_se,
        ratio_z,
        p_large_hat,
        p_large_closed: cond.p_large,
        p_large_se,
        p_large_z,
        within_3sigma: [type2_z, mean_z, ratio_z, p_large_z].iter().all(|z| z.abs() <= 3.0),
        status: if accepted >= MIN_ACCEPTED { EstimateStatus::Conclusive } else { EstimateStatus::Inconclusive },
    }
}
