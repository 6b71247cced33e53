use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Moments;
use crate::sparc::{DesignMatrix, Enumerator, SparcParams};

use super::config::{ExperimentConfig, ExperimentKind, SeedLedger};

/// Fewest accepted `U₁ = 1` draws for a conclusive comparison.
pub const MIN_ACCEPTED: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Conclusive,
    /// Fewer than [`MIN_ACCEPTED`] trials had `U₁ = 1`.
    Inconclusive,
}

/// Monte Carlo estimates of `E X`, `E X²` and `E[X | U₁ = 1]` over random
/// design matrices for a fixed target of norm `ρ²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondMomRow {
    #[serde(rename = "D")]
    pub d: f64,
    pub rho2: f64,
    pub coeff: f64,
    pub trials: u64,
    /// Trials with `U₁ = 1`, i.e. the first codeword is a solution.
    pub accepted: u64,
    pub acceptance_rate: f64,
    #[serde(rename = "EX_hat")]
    pub ex_hat: f64,
    #[serde(rename = "EX_se")]
    pub ex_se: f64,
    #[serde(rename = "EX2_hat")]
    pub ex2_hat: f64,
    #[serde(rename = "EX2_se")]
    pub ex2_se: f64,
    #[serde(rename = "EcondX_hat")]
    pub econd_hat: f64,
    #[serde(rename = "EcondX_se")]
    pub econd_se: f64,
    /// `Ê[X²] − Ê X · Ê[X | U₁ = 1]`.
    pub residual: f64,
    /// `√(se(X²)² + (Ê X · se(X|U₁))² + (Ê[X|U₁] · se(X))²)`.
    pub pooled_se: f64,
    /// `|residual| / pooled_se`; zero when both vanish.
    pub identity_residual_sigma: f64,
    /// `Ê[X | U₁ = 1] ≥ Ê X − 2·se`.
    pub cond_not_below_mean: bool,
    pub status: EstimateStatus,
}

/// Constant target `(√ρ², …, √ρ²)` of normalized squared norm `ρ²`.
pub fn constant_target(n: usize, rho2: f64) -> Vec<f64> {
    vec![rho2.sqrt(); n]
}

/// Returns `(X, U₁)` for one design matrix.
fn count_with_first(target: &[f64], a: &DesignMatrix, coeff: f64, d: f64) -> Result<(u64, bool)> {
    let e = Enumerator::new(target, a, coeff)?;
    let mut x = 0u64;
    let mut first = None;
    e.visit(0..a.columns(), |_, d2| {
        let hit = d2 <= d;
        first.get_or_insert(hit);
        x += u64::from(hit);
    });
    Ok((x, first.unwrap_or(false)))
}

pub fn run_second_mom(config: &ExperimentConfig) -> Result<Vec<SecondMomRow>> {
    if config.kind != ExperimentKind::SecondMom {
        return Err(Error::Config(vec![format!("kind: expected second_mom, got {}", config.kind.as_str())]));
    }
    config.validate()?;
    let code = config.code.expect("validated");
    let params = SparcParams::from_geometry(code.n, code.sections, code.columns.expect("validated"))?;
    let rho2 = config.point.rho2.unwrap_or(config.point.sigma2);
    let target = constant_target(params.n, rho2);
    let ledger = SeedLedger::new(config.base_seed, config.grid.len(), config.trials)?;

    let mut rows = Vec::with_capacity(config.grid.len());
    for (g, &d) in config.grid.iter().enumerate() {
        // D ≥ ρ² makes every codeword (including the zero vector) a solution
        let coeff = ((rho2 - d).max(0.0) / params.sections as f64).sqrt();
        let draws = ledger
            .row(g)
            .par_iter()
            .map(|&seed| {
                let a = DesignMatrix::sample(&params, seed)?;
                count_with_first(&target, &a, coeff, d)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(summarize(d, rho2, coeff, &draws));
    }
    Ok(rows)
}

fn summarize(d: f64, rho2: f64, coeff: f64, draws: &[(u64, bool)]) -> SecondMomRow {
    let (mut x, mut x2, mut cond) = (Moments::default(), Moments::default(), Moments::default());
    for &(count, u1) in draws {
        let v = count as f64;
        x.push(v);
        x2.push(v * v);
        if u1 {
            cond.push(v);
        }
    }
    let trials = draws.len() as u64;
    let accepted = cond.count();
    let (ex, ex2) = (x.mean(), x2.mean());
    let (econd, econd_se) = if accepted > 0 { (cond.mean(), cond.std_error()) } else { (f64::NAN, f64::NAN) };
    let residual = ex2 - ex * econd;
    let pooled_se = (x2.std_error().powi(2) + (ex * econd_se).powi(2) + (econd * x.std_error()).powi(2)).sqrt();
    let identity_residual_sigma = if residual == 0.0 { 0.0 } else { residual.abs() / pooled_se };
    let cond_se = (econd_se.powi(2) + x.std_error().powi(2)).sqrt();
    SecondMomRow {
        d,
        rho2,
        coeff,
        trials,
        accepted,
        acceptance_rate: accepted as f64 / trials as f64,
        ex_hat: ex,
        ex_se: x.std_error(),
        ex2_hat: ex2,
        ex2_se: x2.std_error(),
        econd_hat: econd,
        econd_se,
        residual,
        pooled_se,
        identity_residual_sigma,
        cond_not_below_mean: econd >= ex - 2.0 * cond_se,
        status: if accepted >= MIN_ACCEPTED { EstimateStatus::Conclusive } else { EstimateStatus::Inconclusive },
    }
}
