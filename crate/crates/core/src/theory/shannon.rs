//! Rate-distortion and error-exponent quantities for the i.i.d. Gaussian
//! source. All rates are in nats per sample.

use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::numeric::bisect;

/// The Shannon rate-distortion function and the earlier achievable rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShannonRates {
    /// `½·ln(σ²/D)`
    pub r_star: f64,
    /// `max{½·ln(σ²/D), 1 − D/σ²}`
    pub r0: f64,
}

impl ShannonRates {
    pub fn gap(&self) -> f64 {
        self.r0 - self.r_star
    }
}

pub fn shannon_rates(sigma2: f64, d: f64) -> Result<ShannonRates> {
    ensure_positive("sigma2", sigma2)?;
    ensure_positive("D", d)?;
    if d >= sigma2 {
        return Err(Error::domain(format!("D ({d}) must lie in (0, sigma2 = {sigma2})")));
    }
    let ratio = d / sigma2;
    let r_star = -0.5 * ratio.ln();
    let r0 = r_star.max(1.0 - ratio);
    Ok(ShannonRates { r_star, r0 })
}

/// Root `x* ∈ (0, 1)` of `(1 − x) + ½·ln x = 0`, about 0.2032.
///
/// The other root is `x = 1`; the function is positive on `(x*, 1)` with its
/// maximum at `x = ½`, so `(0, ½]` brackets `x*` alone.
pub fn critical_ratio() -> f64 {
    let g = |x: f64| (1.0 - x) + 0.5 * x.ln();
    bisect(g, f64::MIN_POSITIVE, 0.5, 0.0, 0.0).expect("(0, 1/2] brackets the critical ratio")
}

/// Optimal excess-distortion exponent `r*(D, R)` for an `N(0, σ²)` source:
/// zero for `R ≤ ½·ln(σ²/D)`, else `½(a²/σ² − 1 − ln(a²/σ²))`, `a² = D·e^{2R}`.
pub fn opt_error_exponent(sigma2: f64, d: f64, r: f64) -> Result<f64> {
    ensure_positive("sigma2", sigma2)?;
    ensure_positive("D", d)?;
    if !r.is_finite() {
        return Err(Error::domain(format!("R must be finite, got {r}")));
    }
    if r <= 0.5 * (sigma2 / d).ln() {
        return Ok(0.0);
    }
    let a2 = d * (2.0 * r).exp();
    Ok(kl_gaussian_variance(a2 / sigma2))
}

/// Cramér rate of the normalized squared norm of an i.i.d. `N(0, σ²)`
/// sequence at level `t > σ²`: `½(t/σ² − 1 − ln(t/σ²))`.
pub fn gaussian_ld_rate(sigma2: f64, t: f64) -> Result<f64> {
    ensure_positive("sigma2", sigma2)?;
    if !(t > sigma2) || !t.is_finite() {
        return Err(Error::domain(format!("t ({t}) must exceed sigma2 ({sigma2})")));
    }
    Ok(kl_gaussian_variance(t / sigma2))
}

/// `½(u − 1 − ln u)` with the `u → 1` cancellation handled by `ln_1p`.
fn kl_gaussian_variance(u: f64) -> f64 {
    let d = u - 1.0;
    (0.5 * (d - d.ln_1p())).max(0.0)
}
