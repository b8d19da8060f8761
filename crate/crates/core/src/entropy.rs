//! Binary entropy in bits.

use crate::error::{Error, Result};

/// `H(p) = -p log2 p - (1 - p) log2 (1 - p)`, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityDomain(p));
    }
    Ok(h2(p))
}

/// Unchecked variant for internal callers whose argument is a probability by
/// construction. Values within rounding error outside [0, 1] are clamped.
pub(crate) fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}
