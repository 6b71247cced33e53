//! Sparse regression codes (SPARCs) for lossy compression of Gaussian
//! sources.
//!
//! * [`theory`]: closed-form rate functions, error exponents and the
//!   constants governing the section exponent `b`.
//! * [`sparc`]: desk-scale codebooks with exhaustive minimum-distance
//!   encoding and decoding.
//! * [`census`]: solution counting and overlap statistics for a realized
//!   codebook.
//! * [`experiments`]: seeded Monte Carlo campaigns with reproducible CSV
//!   output.

// `!(x > 0.0)` is used on purpose throughout: unlike `x <= 0.0` it also
// rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod census;
pub mod chi2;
pub mod error;
pub mod experiments;
pub mod numeric;
pub mod sparc;
pub mod theory;

pub use error::{Error, Result};
pub use sparc::{BetaIndex, DesignMatrix, EncodeOutcome, EncodeStatus, SparcParams};
pub use theory::{OverlapFraction, RateFnArgs, StylizedParams, TheoryPoint};
