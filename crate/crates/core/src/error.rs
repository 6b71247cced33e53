use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the formula or operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (bracket [{lo:e}, {hi:e}])")]
    Convergence { lo: f64, hi: f64, iterations: usize },

    /// Exhaustive enumeration would exceed the configured codeword budget.
    #[error(
        "codebook of {codewords:.0} codewords exceeds the budget of {budget}; \
         reduce the number of sections or columns per section"
    )]
    Budget { codewords: f64, budget: u64 },

    /// Materializing the design matrix would exceed the memory cap.
    #[error("design matrix needs {entries} entries, cap is {cap}")]
    Allocation { entries: u128, cap: u64 },

    #[error("geometry mismatch: {0}")]
    Geometry(String),

    /// Configuration failed validation; every offending field is listed.
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    /// Statistical procedure could not draw a conclusion (e.g. too few
    /// accepted samples under rejection sampling).
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

/// Rejects non-finite or non-positive values.
pub(crate) fn ensure_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite and > 0, got {v}")))
    }
}
