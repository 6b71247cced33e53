//! Quantities indexed by the overlap fraction `α = r/L` between a solution
//! and another codeword: the second-moment exponent `h(α)` and its
//! `Δ_α` bound, the per-subset distortion `D_α`, the exponent `Λ(α)`, and
//! the constants `b_min`, `c₁`, `η`, `ξ` that control how large the section
//! exponent `b` must be.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::bisect;

use super::rate_fn::rate_fn_unchecked;
use super::types::{OverlapFraction, TheoryPoint};

fn check_alpha(alpha: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { (0.0..=1.0).contains(&alpha) } else { alpha > 0.0 && alpha <= 1.0 };
    if ok {
        Ok(())
    } else {
        let range = if allow_zero { "[0, 1]" } else { "(0, 1]" };
        Err(Error::domain(format!("alpha must lie in {range}, got {alpha}")))
    }
}

/// `h(α) = αR − ½·ln((1+α) / (1 − α(1 − 2D/ρ²)))`.
pub fn h_alpha(alpha: f64, point: &TheoryPoint) -> Result<f64> {
    check_alpha(alpha, false)?;
    let denom = 1.0 - alpha * (1.0 - 2.0 * point.d / point.rho2);
    if !(denom > 0.0) {
        return Err(Error::domain(format!("h(alpha) log argument is nonpositive at alpha = {alpha}")));
    }
    Ok(alpha * point.r - 0.5 * (alpha.ln_1p() - denom.ln()))
}

/// The zero `α* ∈ (0, 1)` of `h`, which exists when
/// `½·ln(ρ²/D) < R < 1 − D/ρ²`. Returns `None` outside that window.
pub fn h_alpha_root(point: &TheoryPoint) -> Result<Option<f64>> {
    let slope_at_zero = point.r - (1.0 - point.d / point.rho2);
    if slope_at_zero >= 0.0 || point.r <= 0.5 * point.ln_ratio() {
        return Ok(None);
    }
    // h is negative just right of 0 and positive at 1; start the bracket
    // where the quadratic term has not yet taken over.
    let mut lo = 1e-6;
    while h_alpha(lo, point)? >= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Ok(None);
        }
    }
    let root = bisect(|a| h_alpha(a, point).unwrap_or(f64::NAN), lo, 1.0, 1e-15, 0.0)?;
    Ok(Some(root))
}

/// Which clause of `min{α, ᾱ, ln 2/ln L}` is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinClause {
    Alpha,
    AlphaBar,
    LogRatio,
}

/// `min{α, 1 − α, ln 2 / ln L}` for a real section count `L ≥ 1`.
pub fn overlap_min_term(alpha: f64, sections: f64) -> (f64, MinClause) {
    let log_ratio = if sections > 1.0 { std::f64::consts::LN_2 / sections.ln() } else { f64::INFINITY };
    let alpha_bar = 1.0 - alpha;
    if alpha <= alpha_bar && alpha <= log_ratio {
        (alpha, MinClause::Alpha)
    } else if alpha_bar <= log_ratio {
        (alpha_bar, MinClause::AlphaBar)
    } else {
        (log_ratio, MinClause::LogRatio)
    }
}

/// Upper bound on the second-moment exponent
/// `Δ_α ≤ κ/L + (R/b)·min{α, ᾱ, ln 2/ln L} − h(α)`.
///
/// `kappa` is caller supplied; `b = ∞` drops the middle term.
pub fn delta_alpha_bound(alpha: OverlapFraction, point: &TheoryPoint, b: f64, kappa: f64) -> Result<f64> {
    if !(kappa >= 0.0) {
        return Err(Error::domain(format!("kappa must be >= 0, got {kappa}")));
    }
    if !(b > 0.0) {
        return Err(Error::domain(format!("b must be > 0, got {b}")));
    }
    let l = alpha.sections() as f64;
    let a = alpha.alpha();
    let (min_term, _) = overlap_min_term(a, l);
    let middle = if b.is_infinite() { 0.0 } else { point.r / b * min_term };
    Ok(kappa / l + middle - h_alpha(a, point)?)
}

/// `g(α) = Rα − ½·ln(ρ² / (ρ²ᾱ + Dα))`; concave on `[0, 1]` with `g(0) = 0`.
pub fn section_rate_margin(alpha: f64, point: &TheoryPoint) -> Result<f64> {
    check_alpha(alpha, true)?;
    let frac = 1.0 - point.d / point.rho2;
    Ok(alpha * point.r + 0.5 * (-alpha * frac).ln_1p())
}

/// `D_α`: root in `z` of `Rα = f(ρ², (ρ²−D)α, z)`.
///
/// `f` is strictly decreasing in `z` and `Rα > f(ρ², (ρ²−D)α, ρ²ᾱ + Dα)`,
/// so the root lies in `(0, ρ²ᾱ + Dα)`. The returned value satisfies
/// `|Rα − f(ρ², (ρ²−D)α, D_α)| < 1e−10`.
pub fn solve_d_alpha(alpha: f64, point: &TheoryPoint) -> Result<f64> {
    check_alpha(alpha, false)?;
    point.require_rate_above_threshold()?;
    let rho2 = point.rho2;
    let y = (rho2 - point.d) * alpha;
    let target = point.r * alpha;
    let upper = rho2 * (1.0 - alpha) + point.d * alpha;
    let residual = |z: f64| rate_fn_unchecked(rho2, y, z) - target;

    let hi = upper * (1.0 - 1e-15);
    let mut lo = upper * 1e-3;
    while residual(lo) <= 0.0 {
        lo *= 1e-3;
        if lo < 1e-300 {
            return Err(Error::Internal(format!("no lower bracket for D_alpha at alpha = {alpha}")));
        }
    }
    if residual(hi) >= 0.0 {
        return Err(Error::Internal(format!(
            "D_alpha upper bracket violated at alpha = {alpha}: f exceeds R·alpha at rho2·(1-alpha) + D·alpha"
        )));
    }
    let root = bisect(residual, lo, hi, 0.0, 1e-13)?;
    let res = residual(root).abs();
    if res >= 1e-10 {
        return Err(Error::Convergence { lo, hi: root, iterations: 0 });
    }
    Ok(root)
}

fn lambda_prefactor(point: &TheoryPoint) -> f64 {
    let q = point.d / point.rho2;
    0.125 * q.powi(4) * (1.0 + q).powi(2) * (1.0 - q)
}

/// `[−1 + (1 + 2√x/(x−1)·inner)^{1/2}]²` with `x = ρ²/D`, evaluated as
/// `(c·inner / (1 + √(1 + c·inner)))²` to avoid cancellation.
fn radical_bracket(x: f64, inner: f64) -> f64 {
    let c = 2.0 * x.sqrt() / (x - 1.0);
    let u = c * inner;
    let v = u / (1.0 + (1.0 + u).sqrt());
    v * v
}

/// `Λ(α)`; `α = 0` gives the limit `Λ(0)` with
/// `R − ½(1 − D/ρ²)` inside the radical.
pub fn lambda_alpha(alpha: f64, point: &TheoryPoint) -> Result<f64> {
    check_alpha(alpha, true)?;
    point.require_rate_above_threshold()?;
    let frac = 1.0 - point.d / point.rho2;
    // R − (1/2α)·ln(ρ²/(ρ²ᾱ + Dα)) = R + ln(1 − α(1 − D/ρ²))/(2α)
    let inner = if alpha == 0.0 { point.r - 0.5 * frac } else { point.r + (-alpha * frac).ln_1p() / (2.0 * alpha) };
    Ok(lambda_prefactor(point) * radical_bracket(point.rho2 / point.d, inner))
}

/// Minimum section exponent
/// `b_min(x) = 20·R·x⁴ / ((1 + 1/x)²(1 − 1/x)[−1 + (1 + 2√x/(x−1)·(R − ½(1 − 1/x)))^{1/2}]²)`
/// on `1 < x ≤ e^{2R}`.
pub fn b_min(x: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("R must be finite and > 0, got {r}")));
    }
    if !(x > 1.0) || x > (2.0 * r).exp() {
        return Err(Error::domain(format!("b_min needs 1 < x <= e^(2R) = {}, got x = {x}", (2.0 * r).exp())));
    }
    let inv = 1.0 / x;
    let inner = r - 0.5 * (1.0 - inv);
    let denom = (1.0 + inv).powi(2) * (1.0 - inv) * radical_bracket(x, inner);
    Ok(20.0 * r * x.powi(4) / denom)
}

/// `c₁ = (ρ²−D)/(24ρ²)·(−R + [R² + 2ρ²(R − ½·ln(ρ²/D))/(ρ²−D)]^{1/2})²`.
pub fn c1_const(point: &TheoryPoint) -> Result<f64> {
    point.require_rate_above_threshold()?;
    let (rho2, d, r) = (point.rho2, point.d, point.r);
    let eps = 2.0 * rho2 * (r - 0.5 * point.ln_ratio()) / (rho2 - d);
    // −R + √(R² + ε) = ε / (R + √(R² + ε))
    let diff = eps / (r + (r * r + eps).sqrt());
    Ok((rho2 - d) / (24.0 * rho2) * diff * diff)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaXi {
    /// `η = L^{−2.5(b/b_min − 1)}`
    Eta,
    /// `ξ = L^{−2.5(b/b_min − 7/5)}`
    Xi,
}

/// `η` or `ξ` for sections `L`, exponent `b` and `b_min(x, R)`.
pub fn eta_xi(sections: f64, b: f64, x: f64, r: f64, mode: EtaXi) -> Result<f64> {
    if !(sections >= 2.0) {
        return Err(Error::domain(format!("L must be >= 2, got {sections}")));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::domain(format!("b must be finite and > 0, got {b}")));
    }
    let bm = b_min(x, r)?;
    let offset = match mode {
        EtaXi::Eta => 1.0,
        EtaXi::Xi => 1.4,
    };
    Ok((-2.5 * (b / bm - offset) * sections.ln()).exp())
}
