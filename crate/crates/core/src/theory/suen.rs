//! Suen's correlation inequality and the dependency-graph ratios it needs
//! for the SPARC codebook.

use serde::Serialize;

use crate::error::{Error, Result};

/// `exp(−min{λ/2, λ/(6δ), λ²/(8Δ)})`.
pub fn suen_bound(lambda: f64, delta: f64, delta_pair: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    if !(delta > 0.0) {
        return Err(Error::domain(format!("delta must be > 0, got {delta}")));
    }
    if !(delta_pair > 0.0) {
        return Err(Error::domain(format!("Delta must be > 0, got {delta_pair}")));
    }
    let m = (lambda / 2.0).min(lambda / (6.0 * delta)).min(lambda * lambda / (8.0 * delta_pair));
    Ok((-m).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuenSparcTerms {
    /// Exact `λ/δ = M^L / (M^L − 1 − (M−1)^L)`.
    pub lambda_over_delta: f64,
    /// `(1−ξ)²·L^{3/2}/4`, the lower bound on `λ²/(8Δ)` up to its constant.
    pub lambda2_over_8delta_lb: f64,
    /// Columns per section used, `round(L^b)` unless given explicitly.
    pub columns: u64,
}

/// Suen terms for `L` sections with `M = round(L^b)` columns each.
pub fn suen_sparc_terms(sections: u64, b: f64, xi: f64) -> Result<SuenSparcTerms> {
    if !(b > 1.0) || !b.is_finite() {
        return Err(Error::domain(format!("b must be finite and > 1, got {b}")));
    }
    if sections < 2 {
        return Err(Error::domain(format!("L must be >= 2, got {sections}")));
    }
    let m = (sections as f64).powf(b).round();
    if !(m < 9.0e15) {
        return Err(Error::domain(format!("M = L^b = {m} is too large")));
    }
    suen_sparc_terms_with_columns(sections, m as u64, xi)
}

/// As [`suen_sparc_terms`] with the column count `M` given directly.
///
/// `λ/δ = 1 / (1 − M^{−L} − (1 − 1/M)^L)` is evaluated in the log domain,
/// so no power of `M` is ever formed.
pub fn suen_sparc_terms_with_columns(sections: u64, columns: u64, xi: f64) -> Result<SuenSparcTerms> {
    if sections < 2 {
        return Err(Error::domain(format!("L must be >= 2, got {sections}")));
    }
    if columns < 2 {
        return Err(Error::domain(format!("M must be >= 2, got {columns}")));
    }
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::domain(format!("xi must lie in [0, 1), got {xi}")));
    }
    let l = sections as f64;
    let m = columns as f64;
    // 1 − (1 − 1/M)^L
    let one_minus_disjoint = -(l * (-1.0 / m).ln_1p()).exp_m1();
    let self_share = (-l * m.ln()).exp();
    let denom = one_minus_disjoint - self_share;
    if !(denom > 0.0) {
        return Err(Error::Internal(format!("degenerate dependency fraction for L = {sections}, M = {columns}")));
    }
    Ok(SuenSparcTerms {
        lambda_over_delta: 1.0 / denom,
        lambda2_over_8delta_lb: (1.0 - xi).powi(2) * l.powf(1.5) / 4.0,
        columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_is_one_without_mass() {
        assert_eq!(suen_bound(0.0, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn min_arithmetic() {
        // min{3, 1, 36/800 = 0.045}
        let b = suen_bound(6.0, 1.0, 100.0).unwrap();
        assert!((b - (-0.045f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn domain_errors() {
        assert!(suen_bound(-1.0, 1.0, 1.0).is_err());
        assert!(suen_bound(1.0, 0.0, 1.0).is_err());
        assert!(suen_bound(1.0, 1.0, 0.0).is_err());
        assert!(suen_sparc_terms(1, 2.0, 0.0).is_err());
        assert!(suen_sparc_terms(4, 1.0, 0.0).is_err());
        assert!(suen_sparc_terms(4, 2.0, 1.0).is_err());
    }

    #[test]
    fn tiny_codebook_ratio() {
        // 9 / (9 − 1 − 4)
        let t = suen_sparc_terms_with_columns(2, 3, 0.0).unwrap();
        assert!((t.lambda_over_delta - 2.25).abs() < 1e-14);
    }

    #[test]
    fn ratio_lower_bound_at_sixteen_sections() {
        let t = suen_sparc_terms(16, 2.0, 0.0).unwrap();
        assert_eq!(t.columns, 256);
        assert!(t.lambda_over_delta >= 8.0);
    }

    #[test]
    fn second_term_without_xi() {
        let t = suen_sparc_terms(4, 2.0, 0.0).unwrap();
        assert!((t.lambda2_over_8delta_lb - 2.0).abs() < 1e-15);
    }
}
