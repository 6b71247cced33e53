use serde::{Deserialize, Serialize};

use crate::chi2::ln_chi2_upper_tail;
use crate::error::{Error, Result};
use crate::theory::{gaussian_ld_rate, shannon_rates};

use super::config::{ExperimentConfig, ExperimentKind};

/// One row of the `R*` versus `R₀` comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateCurveRow {
    pub d_over_sigma2: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "R_star")]
    pub r_star: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    pub gap: f64,
}

/// `R*(D)`, `R₀(D)` and `R₀ − R*` for each `D` in the grid.
pub fn emit_rate_curves(sigma2: f64, d_grid: &[f64]) -> Result<Vec<RateCurveRow>> {
    d_grid
        .iter()
        .map(|&d| {
            if !(d > 0.0 && d < sigma2) {
                return Err(Error::domain(format!("D = {d} outside (0, sigma2 = {sigma2})")));
            }
            let rates = shannon_rates(sigma2, d)?;
            Ok(RateCurveRow { d_over_sigma2: d / sigma2, d, r_star: rates.r_star, r0: rates.r0, gap: rates.gap() })
        })
        .collect()
}

/// Exact chi-square exponent against the Cramér rate at one `(n, t/σ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdRateRow {
    pub n: u32,
    pub t_over_sigma2: f64,
    /// `ln P(χ²_n ≥ n·t/σ²)`.
    pub ln_tail: f64,
    /// `−(1/n)·ln_tail`.
    pub empirical_rate: f64,
    /// `½(t/σ² − 1 − ln(t/σ²))`.
    pub ld_rate: f64,
    pub gap: f64,
    /// `5·ln(n)/n`.
    pub tolerance: f64,
}

/// Rows ordered by `t/σ²`, then by `n`.
pub fn ld_rate_table(sigma2: f64, ratios: &[f64], dofs: &[u32]) -> Result<Vec<LdRateRow>> {
    let mut rows = Vec::with_capacity(ratios.len() * dofs.len());
    for &ratio in ratios {
        let rate = gaussian_ld_rate(sigma2, ratio * sigma2)?;
        for &n in dofs {
            let nf = n as f64;
            let ln_tail = ln_chi2_upper_tail(n, nf * ratio)?;
            let empirical_rate = -ln_tail / nf;
            rows.push(LdRateRow {
                n,
                t_over_sigma2: ratio,
                ln_tail,
                empirical_rate,
                ld_rate: rate,
                gap: (empirical_rate - rate).abs(),
                tolerance: 5.0 * nf.ln() / nf,
            });
        }
    }
    Ok(rows)
}

pub fn run_rate_curves(config: &ExperimentConfig) -> Result<Vec<RateCurveRow>> {
    if config.kind != ExperimentKind::RateCurves {
        return Err(Error::Config(vec![format!("kind: expected rate_curves, got {}", config.kind.as_str())]));
    }
    config.validate()?;
    let sigma2 = config.point.sigma2;
    let d_grid: Vec<f64> = config.grid.iter().map(|x| x * sigma2).collect();
    emit_rate_curves(sigma2, &d_grid)
}

pub fn run_ld_rate(config: &ExperimentConfig) -> Result<Vec<LdRateRow>> {
    if config.kind != ExperimentKind::LdRate {
        return Err(Error::Config(vec![format!("kind: expected ld_rate, got {}", config.kind.as_str())]));
    }
    config.validate()?;
    ld_rate_table(config.point.sigma2, &config.grid, &config.dofs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::critical_ratio;

    #[test]
    fn gap_zero_below_critical_ratio() {
        let rows = emit_rate_curves(1.0, &[0.1, 0.5]).unwrap();
        assert_eq!(rows[0].gap, 0.0);
        assert!((rows[1].gap - (0.5 - 0.5 * 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn gap_continuous_at_critical_ratio() {
        let x = critical_ratio();
        let rows = emit_rate_curves(2.0, &[2.0 * x, 2.0 * x * (1.0 + 1e-9)]).unwrap();
        assert!(rows[0].gap.abs() < 1e-10);
        assert!(rows[1].gap.abs() < 1e-8);
    }

    #[test]
    fn ld_gap_shrinks_with_n() {
        let rows = ld_rate_table(1.0, &[1.5, 2.0, 3.0], &[100, 400, 1600]).unwrap();
        for chunk in rows.chunks(3) {
            assert!(chunk[0].gap > chunk[1].gap && chunk[1].gap > chunk[2].gap);
            assert!(chunk[2].gap < chunk[2].tolerance);
        }
    }
}
