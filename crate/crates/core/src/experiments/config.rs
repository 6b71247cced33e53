use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::sparc::{SparcParams, DEFAULT_CODEWORD_BUDGET};

/// Identifier of [`derive_seed`], recorded in manifests.
pub const SEED_ALGORITHM: &str = "sha256(le64 base_seed|le64 grid_index|le64 trial_index)[0..8] as le64";

/// Largest codebook allowed for the second-moment campaign.
pub const SECOND_MOM_MAX_CODEWORDS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Grid over rates `R`; empirical excess-distortion probability.
    PeSweep,
    /// Grid over distortions `D`; checks `E X² = E X · E[X | U₁ = 1]`.
    SecondMom,
    /// Grid over `p`; simulates the two-type toy model.
    Stylized,
    /// Grid over `t/σ²`; exact chi-square tails against the Cramér rate.
    LdRate,
    /// Grid over `D/σ²`; `R*`, `R₀` and their gap.
    RateCurves,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::PeSweep => "pe_sweep",
            ExperimentKind::SecondMom => "second_mom",
            ExperimentKind::Stylized => "stylized",
            ExperimentKind::LdRate => "ld_rate",
            ExperimentKind::RateCurves => "rate_curves",
        }
    }
}

/// Code geometry. For `pe_sweep`, `M` is derived from each grid rate and
/// must be omitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    pub n: usize,
    #[serde(rename = "L")]
    pub sections: usize,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<usize>,
}

/// Source and distortion parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    #[serde(default = "one")]
    pub sigma2: f64,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    /// Norm of the fixed target in `second_mom`; defaults to `sigma2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho2: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for PointSpec {
    fn default() -> Self {
        PointSpec { sigma2: 1.0, d: None, gamma2: None, rho2: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StylizedSpec {
    pub n: f64,
}

fn default_budget() -> u64 {
    DEFAULT_CODEWORD_BUDGET
}

fn default_eps() -> f64 {
    1.0
}

fn default_dofs() -> Vec<u32> {
    vec![100, 400, 1600]
}

/// One campaign, parsed from JSON or TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub trials: u64,
    pub base_seed: u64,
    pub grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeSpec>,
    #[serde(default)]
    pub point: PointSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stylized: Option<StylizedSpec>,
    /// Codeword cap for exhaustive passes.
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Threshold for the ε-good flag in `pe_sweep` trial records.
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Degrees of freedom for `ld_rate`.
    #[serde(default = "default_dofs")]
    pub dofs: Vec<u32>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// `.toml` files are TOML; everything else is JSON.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("toml") => Self::from_toml(&text),
            _ => Self::from_json(&text),
        }
    }

    /// Canonical JSON of the resolved configuration (defaults filled in).
    pub fn canonical_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("config serializes")
    }

    /// Hex SHA-256 of [`Self::canonical_json`].
    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json()))
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.trials == 0 {
            bad.push("trials: must be >= 1".to_string());
        }
        if self.grid.is_empty() {
            bad.push("grid: must be nonempty".to_string());
        }
        for (i, v) in self.grid.iter().enumerate() {
            if !v.is_finite() {
                bad.push(format!("grid[{i}]: must be finite, got {v}"));
            }
        }
        if !(self.point.sigma2 > 0.0 && self.point.sigma2.is_finite()) {
            bad.push(format!("point.sigma2: must be finite and > 0, got {}", self.point.sigma2));
        }
        if self.budget == 0 {
            bad.push("budget: must be >= 1".to_string());
        }
        match self.kind {
            ExperimentKind::PeSweep => self.validate_pe_sweep(&mut bad),
            ExperimentKind::SecondMom => self.validate_second_mom(&mut bad),
            ExperimentKind::Stylized => self.validate_stylized(&mut bad),
            ExperimentKind::LdRate => {
                for (i, &v) in self.grid.iter().enumerate() {
                    if !(v > 1.0) {
                        bad.push(format!("grid[{i}]: t/sigma2 must be > 1 for an upper-tail rate, got {v}"));
                    }
                }
                if self.dofs.is_empty() {
                    bad.push("dofs: must be nonempty".to_string());
                }
                if self.dofs.contains(&0) {
                    bad.push("dofs: entries must be >= 1".to_string());
                }
            }
            ExperimentKind::RateCurves => {
                for (i, &v) in self.grid.iter().enumerate() {
                    if !(v > 0.0 && v < 1.0) {
                        bad.push(format!("grid[{i}]: D/sigma2 must lie in (0, 1), got {v}"));
                    }
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }

    fn validate_pe_sweep(&self, bad: &mut Vec<String>) {
        match self.point.d {
            Some(d) if d > 0.0 && d.is_finite() => {
                if let Some(g) = self.point.gamma2 {
                    if !(g > d && g.is_finite()) {
                        bad.push(format!("point.gamma2: must be finite and exceed D ({d}), got {g}"));
                    }
                }
            }
            Some(d) => bad.push(format!("point.D: must be finite and > 0, got {d}")),
            None => bad.push("point.D: required for pe_sweep".to_string()),
        }
        if self.point.gamma2.is_none() {
            bad.push("point.gamma2: required for pe_sweep".to_string());
        }
        if !(self.eps >= 0.0) {
            bad.push(format!("eps: must be >= 0, got {}", self.eps));
        }
        let Some(code) = self.code else {
            bad.push("code: required for pe_sweep (n, L)".to_string());
            return;
        };
        if code.n == 0 {
            bad.push("code.n: must be >= 1".to_string());
        }
        if code.sections == 0 {
            bad.push("code.L: must be >= 1".to_string());
        }
        if code.columns.is_some() {
            bad.push("code.M: derived from each grid rate in pe_sweep; remove it".to_string());
        }
        if code.n == 0 || code.sections == 0 {
            return;
        }
        for (i, &r) in self.grid.iter().enumerate() {
            if !(r >= 0.0) {
                bad.push(format!("grid[{i}]: rate must be >= 0, got {r}"));
                continue;
            }
            match sweep_geometry(code.n, code.sections, r) {
                Ok(p) if r > 0.0 && (p.rate_actual - r).abs() > 0.5 * r => bad.push(format!(
                    "grid[{i}]: R_actual = {} (M = {}) drifts more than 50% from R = {r}",
                    p.rate_actual, p.columns
                )),
                Ok(_) => {}
                Err(e) => bad.push(format!("grid[{i}]: {e}")),
            }
        }
    }

    fn validate_second_mom(&self, bad: &mut Vec<String>) {
        for (i, &d) in self.grid.iter().enumerate() {
            if !(d > 0.0) {
                bad.push(format!("grid[{i}]: D must be > 0, got {d}"));
            }
        }
        if let Some(r) = self.point.rho2 {
            if !(r > 0.0 && r.is_finite()) {
                bad.push(format!("point.rho2: must be finite and > 0, got {r}"));
            }
        }
        let Some(code) = self.code else {
            bad.push("code: required for second_mom (n, L, M)".to_string());
            return;
        };
        if code.n == 0 {
            bad.push("code.n: must be >= 1".to_string());
        }
        if code.sections == 0 {
            bad.push("code.L: must be >= 1".to_string());
        }
        match code.columns {
            None => bad.push("code.M: required for second_mom".to_string()),
            Some(m) if m < 2 => bad.push(format!("code.M: must be >= 2, got {m}")),
            Some(m) => {
                let count = u32::try_from(code.sections).ok().and_then(|l| (m as u64).checked_pow(l));
                if !matches!(count, Some(c) if c <= SECOND_MOM_MAX_CODEWORDS) {
                    bad.push(format!(
                        "code: M^L must be <= {SECOND_MOM_MAX_CODEWORDS} for second_mom, got {m}^{}",
                        code.sections
                    ));
                }
            }
        }
    }

    fn validate_stylized(&self, bad: &mut Vec<String>) {
        match self.stylized {
            None => bad.push("stylized: required for stylized (n)".to_string()),
            Some(s) if !(s.n >= 1.0 && s.n <= 300.0) => {
                bad.push(format!("stylized.n: must lie in [1, 300], got {}", s.n))
            }
            Some(_) => {}
        }
        for (i, &p) in self.grid.iter().enumerate() {
            if !(p > 0.0) {
                bad.push(format!("grid[{i}]: p must be > 0, got {p}"));
            }
        }
    }
}

/// Geometry used by the rate sweep: `M = round(e^{nR/L})`, with `R = 0`
/// mapped to a single codeword (`M = 1`).
pub fn sweep_geometry(n: usize, sections: usize, rate: f64) -> Result<SparcParams> {
    if rate == 0.0 {
        return Ok(SparcParams { n, sections, columns: 1, b: None, rate_nominal: 0.0, rate_actual: 0.0 });
    }
    let m = (n as f64 * rate / sections as f64).exp().round().max(2.0);
    if m > u32::MAX as f64 {
        return Err(Error::Config(vec![format!("M = {m} for R = {rate} exceeds 2^32")]));
    }
    let mut p = SparcParams::from_geometry(n, sections, m as usize)?;
    p.rate_nominal = rate;
    Ok(p)
}

/// Per-trial seed. Distinct `(grid_index, trial_index)` pairs give distinct
/// seeds with overwhelming probability; [`SeedLedger`] verifies it per run.
pub fn derive_seed(base_seed: u64, grid_index: u64, trial_index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(base_seed.to_le_bytes());
    h.update(grid_index.to_le_bytes());
    h.update(trial_index.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Derives every seed of a run up front and rejects collisions.
#[derive(Debug, Clone)]
pub struct SeedLedger {
    seeds: Vec<Vec<u64>>,
}

impl SeedLedger {
    pub fn new(base_seed: u64, grid_len: usize, trials: u64) -> Result<Self> {
        let mut seen = HashSet::with_capacity(grid_len * trials as usize);
        let mut seeds = Vec::with_capacity(grid_len);
        for g in 0..grid_len as u64 {
            let row: Vec<u64> = (0..trials).map(|t| derive_seed(base_seed, g, t)).collect();
            for (t, &s) in row.iter().enumerate() {
                if !seen.insert(s) {
                    return Err(Error::Internal(format!("derived seed collision at grid {g}, trial {t}")));
                }
            }
            seeds.push(row);
        }
        Ok(SeedLedger { seeds })
    }

    pub fn seed(&self, grid_index: usize, trial_index: u64) -> u64 {
        self.seeds[grid_index][trial_index as usize]
    }

    pub fn row(&self, grid_index: usize) -> &[u64] {
        &self.seeds[grid_index]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pe_config() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{"kind":"pe_sweep","trials":10,"base_seed":1,"grid":[0.2,0.5],
                "code":{"n":20,"L":2},"point":{"sigma2":1.0,"D":0.8,"gamma2":2.0}}"#,
        )
        .unwrap()
    }

    #[test]
    fn json_and_toml_agree() {
        let toml_cfg = ExperimentConfig::from_toml(
            "kind = \"pe_sweep\"\ntrials = 10\nbase_seed = 1\ngrid = [0.2, 0.5]\n\
             [code]\nn = 20\nL = 2\n[point]\nsigma2 = 1.0\nD = 0.8\ngamma2 = 2.0\n",
        )
        .unwrap();
        assert_eq!(toml_cfg, pe_config());
        assert_eq!(toml_cfg.sha256(), pe_config().sha256());
        assert!(pe_config().validate().is_ok());
    }

    #[test]
    fn validation_lists_every_field() {
        let mut c = pe_config();
        c.trials = 0;
        c.grid = vec![-1.0];
        c.point.d = None;
        c.code = Some(CodeSpec { n: 20, sections: 2, columns: Some(8) });
        match c.validate() {
            Err(Error::Config(v)) => {
                let text = v.join("\n");
                for key in ["trials", "grid[0]", "point.D", "code.M"] {
                    assert!(text.contains(key), "{key} missing from {text}");
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"kind":"stylized","trials":1,"base_seed":1,"grid":[1],"tirals":3}"#)
            .is_err());
    }

    #[test]
    fn drifting_rate_is_rejected() {
        let mut c = pe_config();
        // n R / L = 0.1 → M rounds to 2, R_actual = ln 2 / 10 ≫ 0.01
        c.grid = vec![0.01];
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_geometry_hits_requested_m() {
        let p = sweep_geometry(20, 2, 2.0 * 8f64.ln() / 20.0).unwrap();
        assert_eq!(p.columns, 8);
        assert_eq!(sweep_geometry(20, 2, 0.0).unwrap().columns, 1);
    }

    #[test]
    fn derived_seeds_are_injective_over_a_run() {
        let ledger = SeedLedger::new(12345, 50, 2000).unwrap();
        assert_eq!(ledger.seed(3, 7), derive_seed(12345, 3, 7));
        assert_ne!(derive_seed(1, 0, 1), derive_seed(1, 1, 0));
    }
}
