use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::matrix::{mean_square, mean_square_distance, synthesize_codeword, DesignMatrix};
use super::params::{BetaIndex, SparcParams};
use super::quantizer::{quantizer_level, scalar_quantize};
use super::search::{min_distance_search, DEFAULT_CODEWORD_BUDGET};

/// Distortion target, norm ceiling and search budget shared by encoder and
/// decoder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodecSettings {
    #[serde(rename = "D")]
    pub d: f64,
    pub gamma2: f64,
    pub budget: u64,
}

impl CodecSettings {
    pub fn new(d: f64, gamma2: f64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::domain(format!("D must be finite and > 0, got {d}")));
        }
        if !(gamma2 > d && gamma2.is_finite()) {
            return Err(Error::domain(format!("gamma2 ({gamma2}) must be finite and exceed D ({d})")));
        }
        Ok(CodecSettings { d, gamma2, budget: DEFAULT_CODEWORD_BUDGET })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodeStatus {
    /// `|S|² ≥ γ²`: the encoder declares an error.
    NormOverflow,
    /// `|S|² ≤ D`: the all-zero reconstruction already meets the target.
    TrivialZero,
    Coded,
}

impl EncodeStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            EncodeStatus::NormOverflow => "norm_overflow",
            EncodeStatus::TrivialZero => "trivial_zero",
            EncodeStatus::Coded => "coded",
        }
    }
}

/// Result of encoding one source block. Norms are normalized (mean square).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodeOutcome {
    pub status: EncodeStatus,
    /// Quantizer cell in `[1, n]`.
    pub q_index: Option<u32>,
    pub beta_hat: Option<BetaIndex>,
    /// Value of every nonzero entry of `β̂`, `√((Q − D)/L)`; zero unless coded.
    pub coeff: f64,
    /// `|S̃ − Aβ̂|²`.
    pub distortion_tilde: Option<f64>,
    /// `|S − Ŝ|²`; absent on overflow.
    pub distortion_total: Option<f64>,
}

/// Encoder output together with the intermediate vectors.
#[derive(Debug, Clone)]
pub struct EncodeTrace {
    pub outcome: EncodeOutcome,
    /// `√(Q/|S|²)·S`, present when coded.
    pub s_tilde: Option<Vec<f64>>,
    /// Decoder output `Ŝ`; empty on overflow.
    pub reconstruction: Vec<f64>,
    pub source_norm2: f64,
}

/// Nonzero value of `β` for quantized norm `q`.
pub fn section_coefficient(q: f64, d: f64, sections: usize) -> f64 {
    ((q - d) / sections as f64).sqrt()
}

fn check_inputs(source: &[f64], a: &DesignMatrix, params: &SparcParams) -> Result<()> {
    a.check_geometry(params)?;
    if source.len() != params.n {
        return Err(Error::Geometry(format!("source has {} samples, block length is {}", source.len(), params.n)));
    }
    if let Some(bad) = source.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("source contains non-finite sample {bad}")));
    }
    Ok(())
}

/// Runs the full encoding pipeline and keeps the intermediate vectors.
pub fn encode_with_trace(
    source: &[f64],
    a: &DesignMatrix,
    params: &SparcParams,
    settings: &CodecSettings,
) -> Result<EncodeTrace> {
    check_inputs(source, a, params)?;
    let CodecSettings { d, gamma2, budget } = *settings;
    let norm2 = mean_square(source);
    if norm2 >= gamma2 {
        return Ok(EncodeTrace {
            outcome: EncodeOutcome {
                status: EncodeStatus::NormOverflow,
                q_index: None,
                beta_hat: None,
                coeff: 0.0,
                distortion_tilde: None,
                distortion_total: None,
            },
            s_tilde: None,
            reconstruction: Vec::new(),
            source_norm2: norm2,
        });
    }
    if norm2 <= d {
        return Ok(EncodeTrace {
            outcome: EncodeOutcome {
                status: EncodeStatus::TrivialZero,
                q_index: None,
                beta_hat: None,
                coeff: 0.0,
                distortion_tilde: None,
                distortion_total: Some(norm2),
            },
            s_tilde: None,
            reconstruction: vec![0.0; params.n],
            source_norm2: norm2,
        });
    }
    let (q_index, q) = scalar_quantize(norm2, d, gamma2, params.n)?;
    let scale = (q / norm2).sqrt();
    let s_tilde: Vec<f64> = source.iter().map(|v| v * scale).collect();
    let coeff = section_coefficient(q, d, params.sections);
    let found = min_distance_search(&s_tilde, a, coeff, budget)?;
    let reconstruction = synthesize_codeword(a, &found.beta, coeff)?;
    let distortion_total = mean_square_distance(source, &reconstruction);
    Ok(EncodeTrace {
        outcome: EncodeOutcome {
            status: EncodeStatus::Coded,
            q_index: Some(q_index),
            beta_hat: Some(found.beta),
            coeff,
            distortion_tilde: Some(found.d2),
            distortion_total: Some(distortion_total),
        },
        s_tilde: Some(s_tilde),
        reconstruction,
        source_norm2: norm2,
    })
}

pub fn encode(
    source: &[f64],
    a: &DesignMatrix,
    params: &SparcParams,
    settings: &CodecSettings,
) -> Result<EncodeOutcome> {
    encode_with_trace(source, a, params, settings).map(|t| t.outcome)
}

/// Rebuilds `Ŝ` from a transmitted outcome. The coefficient is recomputed
/// from `(q_index, D, γ², n)` and must match the one recorded by the
/// encoder.
pub fn decode(
    outcome: &EncodeOutcome,
    a: &DesignMatrix,
    params: &SparcParams,
    settings: &CodecSettings,
) -> Result<Vec<f64>> {
    a.check_geometry(params)?;
    match outcome.status {
        EncodeStatus::NormOverflow => {
            Err(Error::domain("norm_overflow outcomes carry no reconstruction and cannot be decoded"))
        }
        EncodeStatus::TrivialZero => Ok(vec![0.0; params.n]),
        EncodeStatus::Coded => {
            let (q_index, beta) = match (outcome.q_index, outcome.beta_hat.as_ref()) {
                (Some(i), Some(b)) => (i, b),
                _ => return Err(Error::domain("coded outcome lacks q_index or beta_hat")),
            };
            if q_index == 0 || q_index as usize > params.n {
                return Err(Error::domain(format!("q_index {q_index} outside [1, {}]", params.n)));
            }
            beta.validate(params)?;
            let q = quantizer_level(q_index, settings.d, settings.gamma2, params.n);
            let coeff = section_coefficient(q, settings.d, params.sections);
            if coeff.to_bits() != outcome.coeff.to_bits() {
                return Err(Error::domain(format!(
                    "recomputed coefficient {coeff} differs from encoded {}; D or gamma2 mismatch",
                    outcome.coeff
                )));
            }
            synthesize_codeword(a, beta, coeff)
        }
    }
}

/// Fixed-width payload size of an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayloadBits {
    pub q_index: u32,
    pub beta: u64,
    pub total: u64,
}

/// `⌈log₂ n⌉ + L·⌈log₂ M⌉` for coded blocks; trivial-zero blocks carry no
/// quantizer index and no `β̂`.
pub fn payload_bits(params: &SparcParams, status: EncodeStatus) -> PayloadBits {
    match status {
        EncodeStatus::Coded => {
            let (q, b) = (params.index_bits(), params.beta_bits());
            PayloadBits { q_index: q, beta: b, total: q as u64 + b }
        }
        _ => PayloadBits { q_index: 0, beta: 0, total: 0 },
    }
}

/// Constants `(κ₁, κ₂)` of the expansion
/// `|S − Aβ̂|² ≤ κ₁/n² + κ₂|S̃ − Aβ̂|/n + |S̃ − Aβ̂|²`, from
/// `|S − S̃| ≤ (γ² − D)/(4√D·n)`.
pub fn triangle_constants(d: f64, gamma2: f64) -> (f64, f64) {
    let base = (gamma2 - d) / (4.0 * d.sqrt());
    (base * base, 2.0 * base)
}

/// Worst-case excess distortion `κ₁/n² + κ₂√D/n` over `D` when
/// `|S̃ − Aβ̂|² ≤ D`.
pub fn distortion_slack(n: usize, d: f64, gamma2: f64) -> f64 {
    let (k1, k2) = triangle_constants(d, gamma2);
    let n = n as f64;
    k1 / (n * n) + k2 * d.sqrt() / n
}

/// Per-trial evaluation of every link in the chain bounding the total
/// distortion by the search distortion. Norms are root-mean-square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleChain {
    /// `|S − S̃|`.
    pub rescale_error: f64,
    /// `(γ² − D)/(4√D·n)`.
    pub rescale_bound: f64,
    /// `|S̃ − Aβ̂|`.
    pub search_error: f64,
    /// `|S − Aβ̂|²`.
    pub total: f64,
    /// `(|S − S̃| + |S̃ − Aβ̂|)²`.
    pub triangle: f64,
    /// `κ₁/n² + κ₂|S̃ − Aβ̂|/n + |S̃ − Aβ̂|²`.
    pub expansion: f64,
}

impl TriangleChain {
    /// Every inequality holds up to a relative rounding allowance.
    pub fn holds(&self) -> bool {
        let tol = |v: f64| 1e-12 * (1.0 + v.abs());
        self.rescale_error <= self.rescale_bound + tol(self.rescale_bound)
            && self.total <= self.triangle + tol(self.triangle)
            && self.triangle <= self.expansion + tol(self.expansion)
    }
}

/// Evaluates the chain for a coded trace. Returns `None` unless coded.
pub fn triangle_chain(source: &[f64], trace: &EncodeTrace, settings: &CodecSettings) -> Option<TriangleChain> {
    let s_tilde = trace.s_tilde.as_ref()?;
    let n = source.len();
    let rescale_error = mean_square_distance(source, s_tilde).sqrt();
    let search_error = mean_square_distance(s_tilde, &trace.reconstruction).sqrt();
    let total = mean_square_distance(source, &trace.reconstruction);
    let (k1, k2) = triangle_constants(settings.d, settings.gamma2);
    let nf = n as f64;
    Some(TriangleChain {
        rescale_error,
        rescale_bound: k2 / 2.0 / nf,
        search_error,
        total,
        triangle: (rescale_error + search_error).powi(2),
        expansion: k1 / (nf * nf) + k2 * search_error / nf + search_error * search_error,
    })
}
