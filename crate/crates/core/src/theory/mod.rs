//! Closed-form rate-distortion, large-deviation and second-moment
//! quantities. Everything here is a pure function of its arguments.

mod overlap;
mod rate_fn;
mod shannon;
mod stylized;
mod suen;
mod types;

pub use overlap::{
    b_min, c1_const, delta_alpha_bound, eta_xi, h_alpha, h_alpha_root, lambda_alpha, overlap_min_term,
    section_rate_margin, solve_d_alpha, EtaXi, MinClause,
};
pub use rate_fn::{rate_fn_f, rate_fn_f_oracle};
pub use shannon::{critical_ratio, gaussian_ld_rate, opt_error_exponent, shannon_rates, ShannonRates};
pub use stylized::{
    stylized_cond_dist, stylized_ln_mean, stylized_ln_ratio, stylized_ratio, stylized_regime, ConditionalDistribution,
    StylizedRegime,
};
pub use suen::{suen_bound, suen_sparc_terms, suen_sparc_terms_with_columns, SuenSparcTerms};
pub use types::{OverlapFraction, RateFnArgs, StylizedParams, TheoryPoint};

use serde::Serialize;

use crate::error::Result;

/// One row of a per-`α` table.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaRow {
    pub r: u32,
    pub alpha: f64,
    pub d_alpha: f64,
    pub lambda: f64,
    pub h: f64,
}

/// Every closed-form quantity for one operating point.
#[derive(Debug, Clone, Serialize)]
pub struct TheoryPanel {
    pub point: TheoryPoint,
    pub sections: u32,
    pub b: f64,
    pub r_star: f64,
    pub r0: f64,
    pub x_star: f64,
    pub error_exponent: f64,
    pub b_min: f64,
    pub c1: f64,
    pub lambda0: f64,
    pub eta: f64,
    pub xi: f64,
    pub alpha_grid: Vec<AlphaRow>,
}

/// Evaluates the full panel at `point` for `sections` sections and section
/// exponent `b`. `b_min`, `η` and `ξ` use `x = ρ²/D`.
pub fn theory_panel(point: &TheoryPoint, sections: u32, b: f64) -> Result<TheoryPanel> {
    point.require_rate_above_threshold()?;
    let rates = shannon_rates(point.sigma2, point.d)?;
    let x = point.rho2 / point.d;
    let alpha_grid = OverlapFraction::grid(sections)
        .map(|frac| {
            let a = frac.alpha();
            Ok(AlphaRow {
                r: frac.numerator(),
                alpha: a,
                d_alpha: solve_d_alpha(a, point)?,
                lambda: lambda_alpha(a, point)?,
                h: h_alpha(a, point)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TheoryPanel {
        point: *point,
        sections,
        b,
        r_star: rates.r_star,
        r0: rates.r0,
        x_star: critical_ratio(),
        error_exponent: opt_error_exponent(point.sigma2, point.d, point.r)?,
        b_min: b_min(x, point.r)?,
        c1: c1_const(point)?,
        lambda0: lambda_alpha(0.0, point)?,
        eta: eta_xi(sections as f64, b, x, point.r, EtaXi::Eta)?,
        xi: eta_xi(sections as f64, b, x, point.r, EtaXi::Xi)?,
        alpha_grid,
    })
}
