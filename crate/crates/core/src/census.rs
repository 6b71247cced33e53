//! Solution counting for a realized codebook and the overlap combinatorics
//! behind the second-moment and correlation-inequality arguments.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparc::{check_budget, BetaIndex, DesignMatrix, Enumerator};
use crate::theory::TheoryPoint;

/// Number of `β` with `|s̃ − c·Aβ|² ≤ D` (closed inequality, exact
/// comparison on the computed value).
pub fn count_solutions(s_tilde: &[f64], a: &DesignMatrix, d: f64, coeff: f64, budget: u64) -> Result<u64> {
    check_budget(a, budget)?;
    let e = Enumerator::new(s_tilde, a, coeff)?;
    Ok(e.par_fold(|| 0u64, |acc, _, d2| *acc += u64::from(d2 <= d), |x, y| x + y))
}

/// Number of sections in which `b1` and `b2` pick the same column.
pub fn overlap(b1: &BetaIndex, b2: &BetaIndex) -> Result<u32> {
    if b1.len() != b2.len() {
        return Err(Error::Geometry(format!("overlap of betas with {} and {} sections", b1.len(), b2.len())));
    }
    Ok(overlap_unchecked(&b1.sections, &b2.sections))
}

fn overlap_unchecked(b1: &[u32], b2: &[u32]) -> u32 {
    b1.iter().zip(b2).filter(|(x, y)| x == y).count() as u32
}

/// Solution counts bucketed by overlap with `beta_ref`: entry `r` is the
/// number of solutions sharing exactly `r` sections with it.
pub fn count_overlap_solutions(
    s_tilde: &[f64],
    a: &DesignMatrix,
    d: f64,
    coeff: f64,
    beta_ref: &BetaIndex,
    budget: u64,
) -> Result<Vec<u64>> {
    check_budget(a, budget)?;
    if beta_ref.len() != a.sections() || beta_ref.sections.iter().any(|&m| m as usize >= a.columns()) {
        return Err(Error::Geometry(format!(
            "reference beta {:?} invalid for L = {}, M = {}",
            beta_ref.sections,
            a.sections(),
            a.columns()
        )));
    }
    let e = Enumerator::new(s_tilde, a, coeff)?;
    let l = a.sections();
    Ok(e.par_fold(
        || vec![0u64; l + 1],
        |acc, beta, d2| {
            if d2 <= d {
                acc[overlap_unchecked(beta, &beta_ref.sections) as usize] += 1;
            }
        },
        |mut x, y| {
            x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
            x
        },
    ))
}

fn binomial(n: u32, k: u32) -> BigUint {
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

/// Codewords sharing exactly `r` sections with a fixed one:
/// `C(L, r)·(M − 1)^{L−r}`.
pub fn overlap_census(sections: u32, columns: u64, r: u32) -> Result<BigUint> {
    if r > sections {
        return Err(Error::domain(format!("overlap r = {r} exceeds L = {sections}")));
    }
    if columns < 2 {
        return Err(Error::domain(format!("M must be >= 2, got {columns}")));
    }
    Ok(binomial(sections, r) * BigUint::from(columns - 1).pow(sections - r))
}

/// Neighbours of a codeword in the dependency graph (codewords sharing at
/// least one but not all sections): `M^L − 1 − (M − 1)^L`.
pub fn dependency_degree(sections: u32, columns: u64) -> Result<BigUint> {
    if sections == 0 || columns < 2 {
        return Err(Error::domain(format!("need L >= 1 and M >= 2, got L = {sections}, M = {columns}")));
    }
    Ok(BigUint::from(columns).pow(sections) - BigUint::one() - BigUint::from(columns - 1).pow(sections))
}

/// The same degree as the partial-overlap sum `Σ_{r=1}^{L−1} C(L,r)(M−1)^{L−r}`.
pub fn dependency_degree_by_sum(sections: u32, columns: u64) -> Result<BigUint> {
    (1..sections).try_fold(BigUint::zero(), |acc, r| Ok(acc + overlap_census(sections, columns, r)?))
}

/// Provenance of the `E X` value used for ε-goodness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExRefSource {
    TheoryUpperBound,
    MonteCarlo,
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionCensus {
    #[serde(rename = "X")]
    pub x: u64,
    /// `r ↦` number of solutions sharing `r` sections with `reference_beta`.
    pub by_overlap: BTreeMap<u32, u64>,
    pub reference_beta: BetaIndex,
    #[serde(rename = "EX_ref")]
    pub ex_ref: f64,
    #[serde(rename = "EX_ref_source")]
    pub ex_ref_source: ExRefSource,
}

impl SolutionCensus {
    pub fn sections(&self) -> u32 {
        self.reference_beta.len() as u32
    }

    pub fn reference_is_solution(&self) -> bool {
        self.by_overlap.get(&self.sections()).copied().unwrap_or(0) >= 1
    }
}

/// Counts all solutions and buckets them by overlap with `beta_ref`.
pub fn solution_census(
    s_tilde: &[f64],
    a: &DesignMatrix,
    d: f64,
    coeff: f64,
    beta_ref: &BetaIndex,
    ex_ref: (f64, ExRefSource),
    budget: u64,
) -> Result<SolutionCensus> {
    let buckets = count_overlap_solutions(s_tilde, a, d, coeff, beta_ref, budget)?;
    Ok(SolutionCensus {
        x: buckets.iter().sum(),
        by_overlap: buckets.into_iter().enumerate().map(|(r, c)| (r as u32, c)).collect(),
        reference_beta: beta_ref.clone(),
        ex_ref: ex_ref.0,
        ex_ref_source: ex_ref.1,
    })
}

/// `Σ_{r=1}^{L} X_{r/L}(β) < ε·E X`. The sum includes `β` itself (the
/// `r = L` bucket).
pub fn is_eps_good(census: &SolutionCensus, eps: f64) -> Result<bool> {
    if !census.reference_is_solution() {
        return Err(Error::domain("reference beta is not a solution"));
    }
    if !(census.ex_ref > 0.0) {
        return Err(Error::domain(format!("EX_ref must be > 0, got {}", census.ex_ref)));
    }
    let overlapping: u64 = census.by_overlap.range(1..).map(|(_, c)| c).sum();
    Ok((overlapping as f64) < eps * census.ex_ref)
}

/// Bucket table with columns `r, alpha, count, census, ratio_to_EXref`.
pub fn bucket_table_csv(census: &SolutionCensus, columns: u64) -> Result<Vec<u8>> {
    let l = census.sections();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["r", "alpha", "count", "census", "ratio_to_EXref"])?;
    for r in 0..=l {
        let count = census.by_overlap.get(&r).copied().unwrap_or(0);
        w.write_record([
            r.to_string(),
            (r as f64 / l as f64).to_string(),
            count.to_string(),
            overlap_census(l, columns, r)?.to_string(),
            (count as f64 / census.ex_ref).to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Internal(e.to_string()))
}

/// Log-domain bounds on `E X` at block length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedSolutionBounds {
    pub ln_upper: f64,
    pub ln_lower: f64,
    pub kappa: f64,
}

/// `ln E X ≤ n(R − ½ ln(ρ²/D))` and `ln E X ≥` the same `− ½ ln n + ln κ`.
pub fn expected_solutions_bounds(point: &TheoryPoint, n: usize, kappa: f64) -> Result<ExpectedSolutionBounds> {
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::domain(format!("kappa must be finite and > 0, got {kappa}")));
    }
    let nf = n as f64;
    let ln_upper = nf * (point.r - 0.5 * point.ln_ratio());
    Ok(ExpectedSolutionBounds { ln_upper, ln_lower: ln_upper - 0.5 * nf.ln() + kappa.ln(), kappa })
}

/// Convenience: `M^L` as a float, saturating to infinity.
pub fn codebook_size_f64(sections: u32, columns: u64) -> f64 {
    BigUint::from(columns).pow(sections).to_f64().unwrap_or(f64::INFINITY)
}
