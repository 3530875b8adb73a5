use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::markets::{discrete_expected_log, discrete_moments, Market};
use crate::moments::SYMMETRY_TOLERANCE;
use crate::solver::PSD_TOLERANCE;
use crate::strategies::ConditionalOracle;
use crate::types::{Moments, Portfolio, ReturnVector, DEFAULT_M_BOUND, SIMPLEX_TOLERANCE};

/// Upper bound on the probability that one lognormal draw is rejected.
pub const MAX_REJECTION_MASS: f64 = 1e-6;

/// Consecutive rejections after which sampling gives up.
pub const MAX_CONSECUTIVE_REJECTIONS: usize = 1000;

/// Law of one period's returns in an i.i.d. market.
#[derive(Clone, Debug)]
pub enum IidSpec {
    Discrete {
        points: Vec<ReturnVector>,
        probs: Vec<f64>,
    },
    /// `exp(N(mu_log, sigma_log))` conditioned on every entry lying in
    /// `[lower, upper]`.
    TruncatedLognormal {
        mu_log: DVector<f64>,
        sigma_log: DMatrix<f64>,
        factor: DMatrix<f64>,
        lower: f64,
        upper: f64,
    },
}

impl IidSpec {
    pub fn discrete(points: Vec<ReturnVector>, probs: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != probs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} support points with {} probabilities",
                points.len(),
                probs.len()
            )));
        }
        let m = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: p.dim(),
            });
        }
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0))
            || (total - 1.0).abs() > SIMPLEX_TOLERANCE
        {
            return Err(Error::InvalidArgument(
                "probabilities must be non-negative and sum to 1".into(),
            ));
        }
        Ok(Self::Discrete { points, probs })
    }

    /// Validates the parameters and that the rejection mass is below
    /// [`MAX_REJECTION_MASS`].
    pub fn truncated_lognormal(
        mu_log: DVector<f64>,
        sigma_log: DMatrix<f64>,
        lower: f64,
        upper: f64,
    ) -> Result<Self> {
        let spec =
            Self::truncated_lognormal_unchecked(mu_log, sigma_log, lower, upper, DEFAULT_M_BOUND)?;
        let mass = spec.rejection_mass_bound();
        if mass > MAX_REJECTION_MASS {
            return Err(Error::InvalidArgument(format!(
                "truncation rejects up to {mass:e} of the mass (limit {MAX_REJECTION_MASS:e})"
            )));
        }
        Ok(spec)
    }

    pub(crate) fn truncated_lognormal_unchecked(
        mu_log: DVector<f64>,
        sigma_log: DMatrix<f64>,
        lower: f64,
        upper: f64,
        m_bound: f64,
    ) -> Result<Self> {
        let m = mu_log.len();
        if m == 0 || sigma_log.nrows() != m || sigma_log.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: sigma_log.nrows(),
            });
        }
        if !(lower > 0.0 && lower < upper && upper.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bounds must satisfy 0 < lower < upper, got ({lower}, {upper})"
            )));
        }
        if upper * (m as f64).sqrt() > m_bound {
            return Err(Error::InvalidArgument(format!(
                "upper bound {upper} allows return norms above {m_bound}"
            )));
        }
        let moments = Moments::new(mu_log.clone(), sigma_log.clone())?;
        let max_asymmetry = moments.max_asymmetry();
        if max_asymmetry > SYMMETRY_TOLERANCE {
            return Err(Error::Asymmetric { max_asymmetry });
        }
        // A tiny ridge lets the factorization accept singular PSD matrices.
        let ridge = DMatrix::identity(m, m) * PSD_TOLERANCE * 1e-4;
        let factor = Cholesky::new(&sigma_log + ridge)
            .ok_or_else(|| Error::InvalidMoments("sigma_log is not positive semidefinite".into()))?
            .l();
        Ok(Self::TruncatedLognormal {
            mu_log,
            sigma_log,
            factor,
            lower,
            upper,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            IidSpec::Discrete { points, .. } => points[0].dim(),
            IidSpec::TruncatedLognormal { mu_log, .. } => mu_log.len(),
        }
    }

    /// Union bound on the probability that a lognormal draw falls outside
    /// the bounds. Zero for discrete laws.
    pub fn rejection_mass_bound(&self) -> f64 {
        match self {
            IidSpec::Discrete { .. } => 0.0,
            IidSpec::TruncatedLognormal {
                mu_log,
                sigma_log,
                lower,
                upper,
                ..
            } => (0..mu_log.len())
                .map(|j| {
                    let s = sigma_log[(j, j)].max(0.0).sqrt();
                    if s == 0.0 {
                        let x = mu_log[j].exp();
                        return if x < *lower || x > *upper { 1.0 } else { 0.0 };
                    }
                    let lo = (lower.ln() - mu_log[j]) / s;
                    let hi = (upper.ln() - mu_log[j]) / s;
                    normal_cdf(lo) + normal_cdf(-hi)
                })
                .sum(),
        }
    }

    /// Exact moments for discrete laws; the untruncated lognormal moments
    /// otherwise (the truncation moves them by a negligible amount).
    pub fn limiting_moments(&self) -> Moments {
        match self {
            IidSpec::Discrete { points, probs } => discrete_moments(points, probs),
            IidSpec::TruncatedLognormal {
                mu_log, sigma_log, ..
            } => {
                let m = mu_log.len();
                let mean = DVector::from_fn(m, |i, _| (mu_log[i] + 0.5 * sigma_log[(i, i)]).exp());
                let cov =
                    DMatrix::from_fn(m, m, |i, j| mean[i] * mean[j] * sigma_log[(i, j)].exp_m1());
                Moments {
                    mu: mean,
                    sigma: cov,
                }
            }
        }
    }

    /// Exact `E log <b, X>` for discrete laws.
    pub fn expected_log(&self, b: &Portfolio) -> Option<f64> {
        match self {
            IidSpec::Discrete { points, probs } => Some(discrete_expected_log(points, probs, b)),
            IidSpec::TruncatedLognormal { .. } => None,
        }
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// One draw from `spec`.
pub fn iid_sample(spec: &IidSpec, rng: &mut ChaCha8Rng) -> Result<ReturnVector> {
    match spec {
        IidSpec::Discrete { points, probs } => {
            let u: f64 = rng.random();
            let mut cum = 0.0;
            for (x, p) in points.iter().zip(probs) {
                cum += p;
                if u < cum {
                    return Ok(x.clone());
                }
            }
            let last = probs
                .iter()
                .rposition(|p| *p > 0.0)
                .unwrap_or(points.len() - 1);
            Ok(points[last].clone())
        }
        IidSpec::TruncatedLognormal {
            mu_log,
            factor,
            lower,
            upper,
            ..
        } => {
            let m = mu_log.len();
            for _ in 0..MAX_CONSECUTIVE_REJECTIONS {
                let z = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
                let y = mu_log + factor * z;
                let x: Vec<f64> = y.iter().map(|v| v.exp()).collect();
                if x.iter().all(|v| *v >= *lower && *v <= *upper) {
                    return ReturnVector::new(x);
                }
            }
            Err(Error::MisconfiguredBounds(MAX_CONSECUTIVE_REJECTIONS))
        }
    }
}

/// An i.i.d. market driven by a seeded generator.
#[derive(Clone, Debug)]
pub struct IidMarket {
    spec: IidSpec,
    moments: Moments,
    rng: ChaCha8Rng,
}

impl IidMarket {
    pub fn new(spec: IidSpec, rng: ChaCha8Rng) -> Self {
        Self {
            moments: spec.limiting_moments(),
            spec,
            rng,
        }
    }

    pub fn spec(&self) -> &IidSpec {
        &self.spec
    }
}

impl ConditionalOracle for IidMarket {
    fn conditional_key(&self) -> u64 {
        0
    }

    fn conditional_moments(&self) -> Result<Moments> {
        Ok(self.moments.clone())
    }
}

impl Market for IidMarket {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn next_return(&mut self) -> Result<ReturnVector> {
        iid_sample(&self.spec, &mut self.rng)
    }

    fn oracle(&self) -> Option<&dyn ConditionalOracle> {
        Some(self)
    }

    fn limiting_moments(&self) -> Option<Moments> {
        Some(self.moments.clone())
    }

    fn limiting_expected_log(&self, b: &Portfolio) -> Option<f64> {
        self.spec.expected_log(b)
    }
}
