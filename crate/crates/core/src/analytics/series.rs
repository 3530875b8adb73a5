use crate::error::{Error, Result};

/// Largest `sigma / mu` accepted by [`normal_log_series`].
pub const MAX_SERIES_RATIO: f64 = 0.5;

const MAX_TERMS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Number of correction terms summed.
    pub terms: usize,
    /// `false` when summation stopped because the terms started growing
    /// before dropping below the tolerance.
    pub converged: bool,
}

/// Expansion of `E log(X)` for `X ~ N(mu, sigma^2)` around `mu`:
///
/// `log(mu) - sum_{i >= 1} (2i - 1)!! / (2i) * (sigma / mu)^(2i)`.
///
/// The expansion is asymptotic rather than convergent, so summation stops
/// at the first term below `tol` or, failing that, at the smallest term.
pub fn normal_log_series(mu: f64, sigma: f64, tol: f64) -> Result<SeriesValue> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "mean must be positive, got {mu}"
        )));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "deviation must be non-negative, got {sigma}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let ratio = sigma / mu;
    if ratio >= MAX_SERIES_RATIO {
        return Err(Error::DivergenceRisk { ratio });
    }
    let q2 = ratio * ratio;
    // (2i - 1)!! q^(2i)
    let mut scaled = 1.0;
    let mut total = 0.0;
    let mut previous = f64::INFINITY;
    for i in 1..=MAX_TERMS {
        scaled *= (2 * i - 1) as f64 * q2;
        let term = scaled / (2 * i) as f64;
        if term < tol {
            return Ok(SeriesValue {
                value: mu.ln() - total,
                terms: i - 1,
                converged: true,
            });
        }
        if term > previous {
            return Ok(SeriesValue {
                value: mu.ln() - total,
                terms: i - 1,
                converged: false,
            });
        }
        total += term;
        previous = term;
    }
    Ok(SeriesValue {
        value: mu.ln() - total,
        terms: MAX_TERMS,
        converged: false,
    })
}
