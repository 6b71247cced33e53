use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Scalar problem parameters shared by the closed-form operations.
///
/// `a2` is always `D·e^{2R}`; it is recomputed by [`TheoryPoint::new`] and
/// never taken from the caller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub sigma2: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub rho2: f64,
    pub gamma2: f64,
    pub a2: f64,
}

impl TheoryPoint {
    /// Validates `D > 0`, `sigma2 > D`, `rho2 > D`, `gamma2 > sigma2`.
    pub fn new(sigma2: f64, d: f64, r: f64, rho2: f64, gamma2: f64) -> Result<Self> {
        ensure_positive("D", d)?;
        ensure_positive("sigma2", sigma2)?;
        ensure_positive("rho2", rho2)?;
        ensure_positive("gamma2", gamma2)?;
        if !r.is_finite() || r < 0.0 {
            return Err(Error::domain(format!("R must be finite and >= 0, got {r}")));
        }
        if sigma2 <= d {
            return Err(Error::domain(format!("sigma2 ({sigma2}) must exceed D ({d})")));
        }
        if rho2 <= d {
            return Err(Error::domain(format!("rho2 ({rho2}) must exceed D ({d})")));
        }
        if gamma2 <= sigma2 {
            return Err(Error::domain(format!("gamma2 ({gamma2}) must exceed sigma2 ({sigma2})")));
        }
        Ok(TheoryPoint { sigma2, d, r, rho2, gamma2, a2: d * (2.0 * r).exp() })
    }

    /// A point where only `(rho2, D, R)` matter; `sigma2` and `gamma2` are
    /// placed just around `rho2`.
    pub fn conditional(rho2: f64, d: f64, r: f64) -> Result<Self> {
        Self::new(rho2, d, r, rho2, rho2 * (1.0 + 1e-9) + 1e-12)
    }

    /// `ln(rho2 / D)`.
    pub fn ln_ratio(&self) -> f64 {
        (self.rho2 / self.d).ln()
    }

    /// Fails unless `R > ½·ln(rho2/D)`.
    pub fn require_rate_above_threshold(&self) -> Result<()> {
        if self.r > 0.5 * self.ln_ratio() {
            Ok(())
        } else {
            Err(Error::domain(format!("R ({}) must exceed ½·ln(rho2/D) = {}", self.r, 0.5 * self.ln_ratio())))
        }
    }

    /// `gamma2 < a2`, the window required for the error-exponent construction.
    pub fn gamma2_in_window(&self) -> bool {
        self.sigma2 < self.gamma2 && self.gamma2 < self.a2
    }
}

/// Arguments of the rate function `f(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFnArgs {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl RateFnArgs {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        ensure_positive("x", x)?;
        ensure_positive("y", y)?;
        ensure_positive("z", z)?;
        Ok(RateFnArgs { x, y, z })
    }
}

/// Exact fraction `r/L` of sections shared by two codewords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OverlapFraction {
    r: u32,
    l: u32,
}

impl OverlapFraction {
    /// `r ∈ {1, …, L}`.
    pub fn new(r: u32, l: u32) -> Result<Self> {
        if l == 0 || r == 0 || r > l {
            return Err(Error::domain(format!("overlap fraction needs 1 <= r <= L, got r={r}, L={l}")));
        }
        Ok(OverlapFraction { r, l })
    }

    /// `{1/L, 2/L, …, L/L}`.
    pub fn grid(l: u32) -> impl Iterator<Item = OverlapFraction> {
        (1..=l).map(move |r| OverlapFraction { r, l })
    }

    pub fn numerator(&self) -> u32 {
        self.r
    }

    pub fn sections(&self) -> u32 {
        self.l
    }

    pub fn alpha(&self) -> f64 {
        self.r as f64 / self.l as f64
    }

    /// `1 - alpha`, computed from the same integers.
    pub fn alpha_bar(&self) -> f64 {
        (self.l - self.r) as f64 / self.l as f64
    }
}

/// Parameters of the two-type stylized model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StylizedParams {
    pub n: f64,
    pub p: f64,
    /// `ln N`, the log of the number of configurations.
    pub ln_configs: f64,
}

impl StylizedParams {
    /// Uses the smallest admissible configuration count, `N = e^{2n}`.
    pub fn new(n: f64, p: f64) -> Result<Self> {
        Self::with_configs(n, p, 2.0 * n)
    }

    pub fn with_configs(n: f64, p: f64, ln_configs: f64) -> Result<Self> {
        if !(n >= 1.0) || !n.is_finite() {
            return Err(Error::domain(format!("stylized n must be >= 1, got {n}")));
        }
        ensure_positive("p", p)?;
        if !(ln_configs >= 2.0 * n) {
            return Err(Error::domain(format!("ln N ({ln_configs}) must be >= 2n ({})", 2.0 * n)));
        }
        Ok(StylizedParams { n, p, ln_configs })
    }
}
