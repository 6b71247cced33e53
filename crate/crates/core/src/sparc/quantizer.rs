use crate::error::{Error, Result};

/// Output level of cell `i ∈ {1, …, n}`: `D + (γ² − D)(i − ½)/n`.
pub fn quantizer_level(index: u32, d: f64, gamma2: f64, levels: usize) -> f64 {
    d + (gamma2 - d) * (index as f64 - 0.5) / levels as f64
}

/// `n`-level uniform scalar quantizer on `(D, γ²]` with right-closed cells
/// `(D + (γ²−D)(i−1)/n, D + (γ²−D)i/n]`.
///
/// Returns the cell index `i` and its midpoint level `Q`.
pub fn scalar_quantize(x: f64, d: f64, gamma2: f64, levels: usize) -> Result<(u32, f64)> {
    if levels == 0 {
        return Err(Error::domain("quantizer needs at least one level"));
    }
    if !(gamma2 > d) {
        return Err(Error::domain(format!("gamma2 ({gamma2}) must exceed D ({d})")));
    }
    if !(x > d && x <= gamma2) {
        return Err(Error::domain(format!("quantizer input {x} outside (D, gamma2] = ({d}, {gamma2}]")));
    }
    let width = gamma2 - d;
    let n = levels as f64;
    let edge = |i: f64| d + width * i / n;
    let mut i = ((x - d) * n / width).ceil().clamp(1.0, n);
    // repair rounding at cell edges
    while i > 1.0 && x <= edge(i - 1.0) {
        i -= 1.0;
    }
    while i < n && x > edge(i) {
        i += 1.0;
    }
    let index = i as u32;
    Ok((index, quantizer_level(index, d, gamma2, levels)))
}
