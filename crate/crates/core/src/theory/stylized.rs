//! Two-type toy model of second-moment failure.
//!
//! A random structure is of type 1 with probability `1 − e^{−np}` and then
//! has `e^n` solutions, or of type 2 with probability `e^{−np}` and `e^{2n}`
//! solutions. Each of the `N` configurations is equally likely to be a
//! solution.

use serde::{Deserialize, Serialize};

use crate::numeric::{ln_one_minus_exp_neg, log_add_exp, sigmoid, softplus};

use super::types::StylizedParams;

/// Second-moment ratio `E[X | U₁=1] / E X = E X² / (E X)²`.
///
/// Returned as `ln` of the ratio. Computed from
/// `ratio − 1 = q(1−q)(e^{2n} − e^n)² / (E X)²` with `q = e^{−np}`, which is
/// non-negative term by term, so the result is never below zero.
pub fn stylized_ln_ratio(params: &StylizedParams) -> f64 {
    let StylizedParams { n, p, .. } = *params;
    let ln_q = -n * p;
    let ln_one_minus_q = ln_one_minus_exp_neg(n * p);
    let ln_mean = log_add_exp(ln_one_minus_q + n, ln_q + 2.0 * n);
    let ln_gap = 2.0 * n + ln_one_minus_exp_neg(n);
    let ln_excess = ln_q + ln_one_minus_q + 2.0 * ln_gap - 2.0 * ln_mean;
    softplus(ln_excess)
}

/// `((1−e^{−np})e^{2n} + e^{n(4−p)}) / ((1−e^{−np})e^n + e^{n(2−p)})²`.
pub fn stylized_ratio(params: &StylizedParams) -> f64 {
    stylized_ln_ratio(params).exp()
}

/// `ln E X = ln((1−e^{−np})e^n + e^{n(2−p)})`.
pub fn stylized_ln_mean(params: &StylizedParams) -> f64 {
    let StylizedParams { n, p, .. } = *params;
    log_add_exp(ln_one_minus_exp_neg(n * p) + n, n * (2.0 - p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalDistribution {
    /// `P(X = e^n | U₁ = 1)`
    pub p_small: f64,
    /// `P(X = e^{2n} | U₁ = 1)`
    pub p_large: f64,
}

/// Distribution of the solution count given that configuration 1 is a
/// solution, from Bayes' rule.
pub fn stylized_cond_dist(params: &StylizedParams) -> ConditionalDistribution {
    let StylizedParams { n, p, .. } = *params;
    // log-odds of type 2 against type 1 given U₁ = 1
    let log_odds = n * (2.0 - p) - (ln_one_minus_exp_neg(n * p) + n);
    ConditionalDistribution { p_small: sigmoid(-log_odds), p_large: sigmoid(log_odds) }
}

/// Which of the three behaviours the model is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StylizedRegime {
    /// `p ≥ 2`: the second moment method succeeds.
    Succeeds,
    /// `1 < p < 2`: it fails, but conditioning leaves the typical
    /// realization unchanged, so counting only typical solutions repairs it.
    Repairable,
    /// `0 < p ≤ 1`: condensation; conditioning on a solution makes the rare
    /// type dominant.
    Condensation,
}

impl StylizedRegime {
    pub fn case_number(self) -> u8 {
        match self {
            StylizedRegime::Succeeds => 1,
            StylizedRegime::Repairable => 2,
            StylizedRegime::Condensation => 3,
        }
    }
}

pub fn stylized_regime(p: f64) -> StylizedRegime {
    if p >= 2.0 {
        StylizedRegime::Succeeds
    } else if p > 1.0 {
        StylizedRegime::Repairable
    } else {
        StylizedRegime::Condensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: f64, p: f64) -> StylizedParams {
        StylizedParams::new(n, p).unwrap()
    }

    /// Direct evaluation of the bracketed expression, no log domain.
    fn direct_ratio(n: f64, p: f64) -> f64 {
        let q = (-n * p).exp();
        let num = (1.0 - q) * (2.0 * n).exp() + (n * (4.0 - p)).exp();
        let den = (1.0 - q) * n.exp() + (n * (2.0 - p)).exp();
        num / (den * den)
    }

    #[test]
    fn matches_direct_evaluation_for_small_n() {
        for n in 1..=10 {
            for &p in &[0.1, 0.5, 1.0, 1.5, 2.0, 3.0, 7.0] {
                let got = stylized_ratio(&params(n as f64, p));
                let want = direct_ratio(n as f64, p);
                assert!((got - want).abs() <= 1e-12 * want, "n={n} p={p}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn case_one_ratio_tends_to_one() {
        let n = 50.0;
        let r = stylized_ratio(&params(n, 3.0));
        assert!(r >= 1.0);
        assert!(r - 1.0 <= (-n * (3.0 - 2.0)).exp());
    }

    #[test]
    fn growth_rates_in_cases_two_and_three() {
        let rate = |p: f64, n: f64| stylized_ln_ratio(&params(n, p)) / n;
        // Case 2: → 2 − p; Case 3: → p
        assert!((rate(1.5, 400.0) - 0.5).abs() < 0.01);
        assert!((rate(1.5, 400.0) - 0.5).abs() < (rate(1.5, 40.0) - 0.5).abs());
        assert!((rate(0.5, 400.0) - 0.5).abs() < 0.01);
        assert!((rate(0.5, 400.0) - 0.5).abs() < (rate(0.5, 40.0) - 0.5).abs());
    }

    #[test]
    fn conditional_distribution_limits() {
        let (n, p) = (40.0, 1.8);
        let c = stylized_cond_dist(&params(n, p));
        let tail = (-n * (p - 1.0)).exp();
        assert!((c.p_large / tail - 1.0).abs() < 1e-6);

        let (n, p) = (40.0, 0.5);
        let c = stylized_cond_dist(&params(n, p));
        let tail = (-n * (1.0 - p)).exp();
        assert!((c.p_small / tail - 1.0).abs() < 1e-6);
    }

    #[test]
    fn regimes() {
        assert_eq!(stylized_regime(3.0), StylizedRegime::Succeeds);
        assert_eq!(stylized_regime(2.0), StylizedRegime::Succeeds);
        assert_eq!(stylized_regime(1.5), StylizedRegime::Repairable);
        assert_eq!(stylized_regime(1.0), StylizedRegime::Condensation);
        assert_eq!(stylized_regime(0.5).case_number(), 3);
    }
}
