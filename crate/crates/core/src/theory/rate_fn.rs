//! The large-deviation rate function `f(x, y, z)`: the exponential decay
//! rate of the probability that an i.i.d. `N(0, y)` codeword falls within
//! normalized squared distance `z` of a sequence whose normalized squared
//! norm is `x`.

use crate::error::{Error, Result};
use crate::numeric::golden_section_max;

use super::types::RateFnArgs;

/// Closed form of the rate function.
///
/// With `A = √(y² + 4xz) − y`,
/// `f = (x+z)/(2y) − xz/(Ay) − A/(4y) − ½·ln(A/(2x))` for `z ≤ x + y`,
/// and `0` otherwise.
///
/// Evaluated through the algebraically equivalent
/// `(x−y−z)(x−z+y) / (2y(x+z+S)) + ½·ln((S+y)/(2z))`, `S = √(y²+4xz)`,
/// which has no cancellation between large terms.
pub fn rate_fn_f(args: RateFnArgs) -> Result<f64> {
    let RateFnArgs { x, y, z } = RateFnArgs::new(args.x, args.y, args.z)?;
    Ok(rate_fn_unchecked(x, y, z))
}

/// `f(x, y, z)` without argument validation. Callers guarantee positivity.
pub(crate) fn rate_fn_unchecked(x: f64, y: f64, z: f64) -> f64 {
    if z > x + y {
        return 0.0;
    }
    let s = (y * y + 4.0 * x * z).sqrt();
    let quadratic = (x - y - z) * (x - z + y) / (2.0 * y * (x + z + s));
    let log_term = 0.5 * ((s + y) / (2.0 * z)).ln();
    (quadratic + log_term).max(0.0)
}

/// Chernoff-bound evaluation of the same exponent, by direct numerical
/// maximization of
/// `λz − λx/(1−2λy) + ½·ln(1−2λy)` over `λ < 0`,
/// the Legendre transform of the log-moment generating function of
/// `(√x + √y·G)²` with `G` standard normal.
///
/// Shares no algebra with [`rate_fn_f`]; used to cross-check it.
pub fn rate_fn_f_oracle(args: RateFnArgs) -> Result<f64> {
    let RateFnArgs { x, y, z } = RateFnArgs::new(args.x, args.y, args.z)?;
    if z >= x + y {
        return Ok(0.0);
    }
    // t = -λ > 0
    let objective = |t: f64| -t * z + t * x / (1.0 + 2.0 * t * y) + 0.5 * (2.0 * t * y).ln_1p();
    let slope = |t: f64| {
        let u = 1.0 + 2.0 * t * y;
        -z + x / (u * u) + y / u
    };
    let mut hi = 1.0 / y;
    let mut doublings = 0;
    while slope(hi) >= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 || !hi.is_finite() {
            return Err(Error::Convergence { lo: 0.0, hi, iterations: doublings });
        }
    }
    let (_, value) = golden_section_max(objective, 0.0, hi, hi * 1e-13)?;
    Ok(value.max(0.0))
}
