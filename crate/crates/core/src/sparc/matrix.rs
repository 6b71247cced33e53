use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

use super::params::{BetaIndex, SparcParams};

/// Default cap on materialized design-matrix entries (1 GiB of `f64`).
pub const DEFAULT_MEMORY_CAP: u64 = 1 << 27;

/// Identifier of the column-generation scheme, recorded in manifests.
pub const COLUMN_STREAM_ALGORITHM: &str = "chacha8-stream(l<<32|m)-ziggurat-normal";

/// Fills `out` with column `(section, column)` of the design matrix drawn
/// from `seed`.
///
/// Each column has its own ChaCha8 stream, so a column depends only on
/// `(seed, section, column, n)` and can be regenerated on its own.
pub fn generate_column(seed: u64, section: usize, column: usize, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((section as u64) << 32) | column as u64);
    for v in out.iter_mut() {
        *v = StandardNormal.sample(&mut rng);
    }
}

/// The `n × ML` i.i.d. `N(0, 1)` dictionary, stored column-major with
/// section-major column order: column `(ℓ, m)` sits at index `ℓ·M + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    n: usize,
    sections: usize,
    columns: usize,
    seed: u64,
    entries: Vec<f64>,
}

impl DesignMatrix {
    pub fn sample(params: &SparcParams, seed: u64) -> Result<Self> {
        Self::sample_with_cap(params, seed, DEFAULT_MEMORY_CAP)
    }

    pub fn sample_with_cap(params: &SparcParams, seed: u64, cap: u64) -> Result<Self> {
        let (n, sections, columns) = (params.n, params.sections, params.columns);
        let entries = n as u128 * sections as u128 * columns as u128;
        if entries > cap as u128 {
            return Err(Error::Allocation { entries, cap });
        }
        let mut data = vec![0.0; entries as usize];
        for (idx, col) in data.chunks_exact_mut(n).enumerate() {
            generate_column(seed, idx / columns, idx % columns, col);
        }
        Ok(DesignMatrix { n, sections, columns, seed, entries: data })
    }

    /// Builds a matrix from explicit column-major entries (section-major
    /// column order). The seed is informational only.
    pub fn from_columns(n: usize, sections: usize, columns: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * sections * columns {
            return Err(Error::Geometry(format!(
                "expected {} entries for n={n}, L={sections}, M={columns}, got {}",
                n * sections * columns,
                entries.len()
            )));
        }
        Ok(DesignMatrix { n, sections, columns, seed: 0, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sections(&self) -> usize {
        self.sections
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn column(&self, section: usize, column: usize) -> &[f64] {
        let start = (section * self.columns + column) * self.n;
        &self.entries[start..start + self.n]
    }

    /// Fails unless the matrix was built for `params`' geometry.
    pub fn check_geometry(&self, params: &SparcParams) -> Result<()> {
        if (self.n, self.sections, self.columns) != (params.n, params.sections, params.columns) {
            return Err(Error::Geometry(format!(
                "matrix is {}×({}·{}), params are n={}, L={}, M={}",
                self.n, self.sections, self.columns, params.n, params.sections, params.columns
            )));
        }
        Ok(())
    }

    /// Returns a copy with sections reordered: section `ℓ` of the result is
    /// section `order[ℓ]` of `self`.
    pub fn permute_sections(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.sections {
            return Err(Error::Geometry("section permutation has wrong length".into()));
        }
        let block = self.columns * self.n;
        let mut entries = Vec::with_capacity(self.entries.len());
        for &src in order {
            entries.extend_from_slice(&self.entries[src * block..(src + 1) * block]);
        }
        Ok(DesignMatrix { entries, ..*self })
    }
}

/// `coeff · Σ_ℓ A[:, (ℓ, β_ℓ)]`.
pub fn synthesize_codeword(a: &DesignMatrix, beta: &BetaIndex, coeff: f64) -> Result<Vec<f64>> {
    if beta.len() != a.sections() {
        return Err(Error::Geometry(format!("beta has {} sections, matrix has {}", beta.len(), a.sections())));
    }
    let mut out = vec![0.0; a.n()];
    for (l, &m) in beta.sections.iter().enumerate() {
        if m as usize >= a.columns() {
            return Err(Error::Geometry(format!("section {l} picks column {m}, but M = {}", a.columns())));
        }
        for (o, &v) in out.iter_mut().zip(a.column(l, m as usize)) {
            *o += v;
        }
    }
    for o in out.iter_mut() {
        *o *= coeff;
    }
    Ok(out)
}

/// Normalized squared norm `(1/n)·Σ v_i²`.
pub fn mean_square(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64
}

/// Normalized squared distance `(1/n)·Σ (a_i − b_i)²`.
pub fn mean_square_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return 0.0;
    }
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}
