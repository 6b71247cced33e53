use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Code geometry: block length `n`, `L` sections of `M` columns each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparcParams {
    pub n: usize,
    #[serde(rename = "L")]
    pub sections: usize,
    #[serde(rename = "M")]
    pub columns: usize,
    /// Section exponent with `M ≈ L^b`; absent for hand-picked geometries
    /// with a single section.
    pub b: Option<f64>,
    #[serde(rename = "R_nominal")]
    pub rate_nominal: f64,
    /// `L·ln M / n`, so that `M^L = e^{n·R_actual}` exactly.
    #[serde(rename = "R_actual")]
    pub rate_actual: f64,
}

impl SparcParams {
    /// Explicit geometry. The nominal rate is set to the actual rate.
    pub fn from_geometry(n: usize, sections: usize, columns: usize) -> Result<Self> {
        let mut bad = Vec::new();
        if n == 0 {
            bad.push("n must be >= 1".to_string());
        }
        if sections == 0 {
            bad.push("L must be >= 1".to_string());
        }
        if columns < 2 {
            bad.push("M must be >= 2".to_string());
        }
        if !bad.is_empty() {
            return Err(Error::Config(bad));
        }
        let rate = actual_rate(n, sections, columns);
        let b = (sections >= 2).then(|| (columns as f64).ln() / (sections as f64).ln());
        Ok(SparcParams { n, sections, columns, b, rate_nominal: rate, rate_actual: rate })
    }

    /// `ln(M^L) = L·ln M`.
    pub fn ln_codewords(&self) -> f64 {
        self.sections as f64 * (self.columns as f64).ln()
    }

    /// `M^L` if it fits in a `u64`.
    pub fn codeword_count(&self) -> Option<u64> {
        let l = u32::try_from(self.sections).ok()?;
        (self.columns as u64).checked_pow(l)
    }

    /// Total number of design-matrix columns, `M·L`.
    pub fn total_columns(&self) -> usize {
        self.sections * self.columns
    }

    /// Bits for the quantizer index, `⌈log₂ n⌉`.
    pub fn index_bits(&self) -> u32 {
        ceil_log2(self.n as u64)
    }

    /// Bits for the section choices, `L·⌈log₂ M⌉`.
    pub fn beta_bits(&self) -> u64 {
        self.sections as u64 * ceil_log2(self.columns as u64) as u64
    }
}

fn actual_rate(n: usize, sections: usize, columns: usize) -> f64 {
    sections as f64 * (columns as f64).ln() / n as f64
}

pub(crate) fn ceil_log2(v: u64) -> u32 {
    if v <= 1 {
        0
    } else {
        64 - (v - 1).leading_zeros()
    }
}

/// Picks `L ≥ 2` minimizing `|L·ln L − nR/b|` (ties to the smaller `L`) and
/// `M = max(2, round(L^b))`.
///
/// Rejects geometries whose codebook size `M^L` falls below `e^{nR/2}`.
pub fn derive_dimensions(n: usize, rate: f64, b: f64) -> Result<SparcParams> {
    let mut bad = Vec::new();
    if n < 8 {
        bad.push(format!("n must be >= 8, got {n}"));
    }
    if !(rate > 0.0) || !rate.is_finite() {
        bad.push(format!("R must be finite and > 0, got {rate}"));
    }
    if !(b > 1.0) || !b.is_finite() {
        bad.push(format!("b must be finite and > 1, got {b}"));
    }
    if !bad.is_empty() {
        return Err(Error::Config(bad));
    }
    let target = n as f64 * rate / b;
    let objective = |l: usize| ((l as f64) * (l as f64).ln() - target).abs();
    // L·ln L is increasing, so the minimizer is next to the first L whose
    // value reaches the target.
    let mut l = 2usize;
    while (l as f64) * (l as f64).ln() < target {
        l += 1;
    }
    let sections = if l > 2 && objective(l - 1) <= objective(l) { l - 1 } else { l };
    let m = (sections as f64).powf(b).round().max(2.0);
    if m > usize::MAX as f64 / 2.0 {
        return Err(Error::Config(vec![format!("M = L^b = {m} does not fit in memory indices")]));
    }
    let columns = m as usize;
    let rate_actual = actual_rate(n, sections, columns);
    if rate_actual * (n as f64) < n as f64 * rate / 2.0 {
        return Err(Error::Config(vec![format!(
            "degenerate geometry: L = {sections}, M = {columns} gives ln(M^L) = {:.3} < nR/2 = {:.3}",
            rate_actual * n as f64,
            n as f64 * rate / 2.0
        )]));
    }
    Ok(SparcParams { n, sections, columns, b: Some(b), rate_nominal: rate, rate_actual })
}

/// One chosen column per section.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BetaIndex {
    pub sections: Vec<u32>,
}

impl BetaIndex {
    pub fn new(sections: Vec<u32>) -> Self {
        BetaIndex { sections }
    }

    /// The all-first-column codeword `(0, …, 0)`.
    pub fn first(params: &SparcParams) -> Self {
        BetaIndex { sections: vec![0; params.sections] }
    }

    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    pub fn validate(&self, params: &SparcParams) -> Result<()> {
        if self.sections.len() != params.sections {
            return Err(Error::Geometry(format!(
                "beta has {} sections, code has {}",
                self.sections.len(),
                params.sections
            )));
        }
        if let Some((l, &m)) = self.sections.iter().enumerate().find(|(_, &m)| m as usize >= params.columns) {
            return Err(Error::Geometry(format!("section {l} picks column {m}, but M = {}", params.columns)));
        }
        Ok(())
    }

    /// Lexicographic rank in `[0, M^L)` (section 0 most significant).
    pub fn rank(&self, columns: usize) -> u128 {
        self.sections.iter().fold(0u128, |acc, &m| acc * columns as u128 + m as u128)
    }

    pub fn from_rank(mut rank: u128, sections: usize, columns: usize) -> Self {
        let mut out = vec![0u32; sections];
        for slot in out.iter_mut().rev() {
            *slot = (rank % columns as u128) as u32;
            rank /= columns as u128;
        }
        BetaIndex { sections: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_two_section_solution() {
        // nR/b = 2·ln 2 with n = 8, b = 2 → R = ln 2 / 2
        let p = derive_dimensions(8, 0.5 * 2f64.ln(), 2.0).unwrap();
        assert_eq!(p.sections, 2);
        assert_eq!(p.columns, 4);
    }

    #[test]
    fn minimality_against_exhaustive_scan() {
        for &(n, r, b) in &[(24usize, 2f64.ln(), 2.0), (64, 0.5, 2.0), (200, 1.1, 1.5), (512, 0.8, 3.0)] {
            let p = derive_dimensions(n, r, b).unwrap();
            let target = n as f64 * r / b;
            let obj = |l: usize| ((l as f64) * (l as f64).ln() - target).abs();
            let best = (2..=64).min_by(|&a, &c| obj(a).partial_cmp(&obj(c)).unwrap()).unwrap();
            assert_eq!(p.sections, best, "n={n} R={r} b={b}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(derive_dimensions(4, 0.5, 2.0), Err(Error::Config(_))));
        assert!(derive_dimensions(16, 0.0, 2.0).is_err());
        assert!(derive_dimensions(16, 0.5, 1.0).is_err());
        match derive_dimensions(4, -1.0, 0.5) {
            Err(Error::Config(v)) => assert_eq!(v.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bit_accounting() {
        let p = SparcParams::from_geometry(20, 2, 8).unwrap();
        assert_eq!(p.index_bits(), 5);
        assert_eq!(p.beta_bits(), 6);
        assert_eq!(p.codeword_count(), Some(64));
        assert!((p.rate_actual - 2.0 * 8f64.ln() / 20.0).abs() < 1e-15);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(1024), 10);
        assert_eq!(ceil_log2(1025), 11);
    }

    #[test]
    fn beta_rank_roundtrip_and_validation() {
        let b = BetaIndex::new(vec![2, 0, 3]);
        assert_eq!(b.rank(4), 2 * 16 + 3);
        assert_eq!(BetaIndex::from_rank(b.rank(4), 3, 4), b);
        let p = SparcParams::from_geometry(10, 3, 4).unwrap();
        assert!(b.validate(&p).is_ok());
        assert!(BetaIndex::new(vec![4, 0, 0]).validate(&p).is_err());
        assert!(BetaIndex::new(vec![0, 0]).validate(&p).is_err());
    }
}
