//! Exhaustive enumeration of the `M^L` codewords.
//!
//! Codewords are visited in lexicographic order of their [`BetaIndex`]
//! (section 0 most significant). Partial residuals
//! `s − c·Σ_{j<k} A[:, (j, β_j)]` are cached per section, so moving to the
//! next codeword only recomputes the residuals below the section that
//! changed and the innermost section costs one `n`-vector pass per column.
//! Work is split across threads by the first section's column; per-thread
//! results are merged in that order, so outputs do not depend on scheduling.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::matrix::DesignMatrix;
use super::params::BetaIndex;

/// Default cap on the number of codewords an exhaustive pass may visit.
pub const DEFAULT_CODEWORD_BUDGET: u64 = 1 << 24;

/// Fails if `M^L` exceeds `budget`; returns the codeword count otherwise.
pub fn check_budget(a: &DesignMatrix, budget: u64) -> Result<u64> {
    check_codebook_budget(a.sections(), a.columns(), budget)
}

/// [`check_budget`] for a geometry that has not been sampled yet.
pub fn check_codebook_budget(sections: usize, columns: usize, budget: u64) -> Result<u64> {
    let ln_count = sections as f64 * (columns as f64).ln();
    let count = u32::try_from(sections).ok().and_then(|l| (columns as u64).checked_pow(l));
    match count {
        Some(c) if c <= budget => Ok(c),
        _ => Err(Error::Budget { codewords: ln_count.exp(), budget }),
    }
}

/// Minimizer of `|s − Aβ|²` and its normalized squared distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub beta: BetaIndex,
    pub d2: f64,
}

/// Coefficient-scaled copy of the dictionary plus the search target.
pub(crate) struct Enumerator<'a> {
    target: &'a [f64],
    scaled: Vec<f64>,
    n: usize,
    sections: usize,
    columns: usize,
}

impl<'a> Enumerator<'a> {
    pub(crate) fn new(target: &'a [f64], a: &DesignMatrix, coeff: f64) -> Result<Self> {
        if target.len() != a.n() {
            return Err(Error::Geometry(format!("target has length {}, matrix has n = {}", target.len(), a.n())));
        }
        if let Some(bad) = target.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("target contains non-finite value {bad}")));
        }
        if !coeff.is_finite() {
            return Err(Error::domain(format!("coefficient must be finite, got {coeff}")));
        }
        Ok(Enumerator {
            target,
            scaled: a.entries().iter().map(|v| v * coeff).collect(),
            n: a.n(),
            sections: a.sections(),
            columns: a.columns(),
        })
    }

    fn column(&self, section: usize, column: usize) -> &[f64] {
        let start = (section * self.columns + column) * self.n;
        &self.scaled[start..start + self.n]
    }

    /// Calls `visit(β, |s − Aβ|²)` for every codeword whose section-0 column
    /// lies in `first`, in lexicographic order.
    pub(crate) fn visit<F: FnMut(&[u32], f64)>(&self, first: Range<usize>, mut visit: F) {
        let (n, l, m) = (self.n, self.sections, self.columns);
        if first.is_empty() {
            return;
        }
        let inv_n = 1.0 / n as f64;
        let mut beta = vec![0u32; l];
        beta[0] = first.start as u32;
        // residuals[k] = target − Σ_{j<k} c·col(j, β_j), for k in 0..l
        let mut residuals = vec![0.0; l * n];
        residuals[..n].copy_from_slice(self.target);
        let refresh = |residuals: &mut [f64], beta: &[u32], from: usize| {
            for k in from..l {
                if k == 0 {
                    continue;
                }
                let (prev, cur) = residuals.split_at_mut(k * n);
                let prev = &prev[(k - 1) * n..];
                let col = self.column(k - 1, beta[k - 1] as usize);
                for ((c, &p), &a) in cur[..n].iter_mut().zip(prev).zip(col) {
                    *c = p - a;
                }
            }
        };
        refresh(&mut residuals, &beta, 1);

        let last = l - 1;
        let last_range = if l == 1 { first.clone() } else { 0..m };
        loop {
            let r = &residuals[last * n..];
            for col_idx in last_range.clone() {
                let col = self.column(last, col_idx);
                let mut acc = 0.0;
                for (&ri, &ci) in r.iter().zip(col) {
                    let d = ri - ci;
                    acc += d * d;
                }
                beta[last] = col_idx as u32;
                visit(&beta, acc * inv_n);
            }
            if l == 1 {
                return;
            }
            // odometer over sections 0..last
            let mut k = last - 1;
            loop {
                beta[k] += 1;
                let limit = if k == 0 { first.end } else { m };
                if (beta[k] as usize) < limit {
                    break;
                }
                if k == 0 {
                    return;
                }
                beta[k] = 0;
                k -= 1;
            }
            refresh(&mut residuals, &beta, k + 1);
        }
    }

    /// Folds over all codewords, split by section-0 column across threads;
    /// partial results are merged in column order.
    pub(crate) fn par_fold<T, Init, Fold, Merge>(&self, init: Init, fold: Fold, merge: Merge) -> T
    where
        T: Send,
        Init: Fn() -> T + Sync,
        Fold: Fn(&mut T, &[u32], f64) + Sync,
        Merge: Fn(T, T) -> T,
    {
        let parts: Vec<T> = (0..self.columns)
            .into_par_iter()
            .map(|m0| {
                let mut acc = init();
                self.visit(m0..m0 + 1, |beta, d2| fold(&mut acc, beta, d2));
                acc
            })
            .collect();
        parts.into_iter().reduce(merge).unwrap_or_else(init)
    }
}

fn keep_first_min(best: &mut Option<(Vec<u32>, f64)>, beta: &[u32], d2: f64) {
    match best {
        Some((_, d)) if d2 >= *d => {}
        _ => *best = Some((beta.to_vec(), d2)),
    }
}

/// Exhaustive minimum-distance search. Ties go to the lexicographically
/// smallest `β`.
pub fn min_distance_search(target: &[f64], a: &DesignMatrix, coeff: f64, budget: u64) -> Result<SearchResult> {
    check_budget(a, budget)?;
    let e = Enumerator::new(target, a, coeff)?;
    let best = e.par_fold(
        || None,
        keep_first_min,
        |lhs, rhs| match (lhs, rhs) {
            (Some(l), Some(r)) => Some(if r.1 < l.1 { r } else { l }),
            (l, r) => l.or(r),
        },
    );
    let (beta, d2) = best.ok_or_else(|| Error::Internal("empty codebook".into()))?;
    Ok(SearchResult { beta: BetaIndex::new(beta), d2 })
}

/// Single-threaded variant of [`min_distance_search`].
pub fn min_distance_search_serial(target: &[f64], a: &DesignMatrix, coeff: f64, budget: u64) -> Result<SearchResult> {
    check_budget(a, budget)?;
    let e = Enumerator::new(target, a, coeff)?;
    let mut best = None;
    e.visit(0..a.columns(), |beta, d2| keep_first_min(&mut best, beta, d2));
    let (beta, d2) = best.ok_or_else(|| Error::Internal("empty codebook".into()))?;
    Ok(SearchResult { beta: BetaIndex::new(beta), d2 })
}
