//! Upper tail of the chi-square distribution through the regularized upper
//! incomplete gamma function `Q(a, x)`, evaluated in the log domain so that
//! tails far below `f64::MIN_POSITIVE` remain usable.
//!
//! `P(χ²_k ≥ t) = Q(k/2, t/2)`. For `x < a + 1` the lower series for
//! `P(a, x)` converges quickly and `Q = 1 - P`; otherwise the Legendre
//! continued fraction for `Q` is evaluated with the modified Lentz method.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_TERMS: usize = 100_000;

/// Upper-tail probability, or its logarithm when the probability is not
/// representable as a normal `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailProbability {
    Prob(f64),
    Log(f64),
}

impl TailProbability {
    pub fn ln(&self) -> f64 {
        match *self {
            TailProbability::Prob(p) => p.ln(),
            TailProbability::Log(l) => l,
        }
    }
}

/// `P(χ²_dof ≥ threshold)`.
pub fn chi2_upper_tail(dof: u32, threshold: f64) -> Result<TailProbability> {
    let ln_q = ln_chi2_upper_tail(dof, threshold)?;
    if ln_q < f64::MIN_POSITIVE.ln() {
        Ok(TailProbability::Log(ln_q))
    } else {
        Ok(TailProbability::Prob(ln_q.exp()))
    }
}

/// `ln P(χ²_dof ≥ threshold)`.
pub fn ln_chi2_upper_tail(dof: u32, threshold: f64) -> Result<f64> {
    if dof == 0 {
        return Err(Error::domain("chi-square degrees of freedom must be >= 1"));
    }
    if !(threshold >= 0.0) || !threshold.is_finite() {
        return Err(Error::domain(format!("chi-square threshold must be finite and >= 0, got {threshold}")));
    }
    ln_gamma_q(0.5 * dof as f64, 0.5 * threshold)
}

/// `ln Q(a, x)` for `a > 0`, `x >= 0`.
pub fn ln_gamma_q(a: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let ln_prefix = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        let p = (ln_prefix + lower_series(a, x)?.ln()).exp();
        Ok((-p).ln_1p())
    } else {
        Ok(ln_prefix + upper_continued_fraction(a, x)?.ln())
    }
}

/// `Σ x^n / (a (a+1) ... (a+n))`, so that `P(a, x) = e^{-x} x^a / Γ(a) · series`.
fn lower_series(a: f64, x: f64) -> Result<f64> {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_TERMS {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            return Ok(sum);
        }
    }
    Err(Error::Convergence { lo: a, hi: x, iterations: MAX_TERMS })
}

/// Continued fraction with `Q(a, x) = e^{-x} x^a / Γ(a) · cf`.
fn upper_continued_fraction(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::Convergence { lo: a, hi: x, iterations: MAX_TERMS })
}
