//! Domain types shared by every module.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default cap on the Euclidean norm of a return vector.
pub const DEFAULT_M_BOUND: f64 = 10.0;

/// Default threshold on the smallest covariance eigenvalue below which the
/// market is treated as containing redundant assets.
pub const DEFAULT_REDUNDANCY_TOLERANCE: f64 = 1e-8;

/// Tolerance on `sum(weights) == 1`.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

/// One period's gross returns (price ratios) for `m` assets.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnVector(Vec<f64>);

impl ReturnVector {
    /// Validates against [`DEFAULT_M_BOUND`].
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_bound(values, DEFAULT_M_BOUND)
    }

    pub fn with_bound(values: Vec<f64>, m_bound: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidReturn("empty return vector".into()));
        }
        if let Some((j, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidReturn(format!(
                "entry {j} is {v}; returns must be finite and strictly positive"
            )));
        }
        let norm = euclidean_norm(&values);
        if norm > m_bound {
            return Err(Error::InvalidReturn(format!(
                "norm {norm} exceeds bound {m_bound}"
            )));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        euclidean_norm(&self.0)
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }
}

/// A point on the probability simplex: long-only, fully invested weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Portfolio(Vec<f64>);

impl Portfolio {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidPortfolio("no assets".into()));
        }
        if let Some((j, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            return Err(Error::InvalidPortfolio(format!(
                "weight {j} is {w}; weights must be non-negative"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::InvalidPortfolio(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self(weights))
    }

    pub fn uniform(m: usize) -> Self {
        assert!(m > 0, "uniform portfolio needs at least one asset");
        Self(vec![1.0 / m as f64; m])
    }

    /// Clamps negative round-off to zero and rescales onto the simplex.
    pub(crate) fn renormalized(mut weights: Vec<f64>) -> Self {
        for w in weights.iter_mut() {
            if *w < 0.0 || !w.is_finite() {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            for w in weights.iter_mut() {
                *w /= total;
            }
            Self(weights)
        } else {
            Self::uniform(weights.len())
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    /// Portfolio gross return `<b, x>`.
    pub fn gross_return(&self, x: &ReturnVector) -> f64 {
        dot(&self.0, x.as_slice())
    }

    pub fn distance(&self, other: &Portfolio) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Display for Portfolio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w:.6}")?;
        }
        write!(f, ")")
    }
}

/// Mean per unit variance traded off by the mean-variance utility.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct RiskAversion(f64);

impl RiskAversion {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha >= 0.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidRiskAversion(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for RiskAversion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// First two moments of a return distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
}

impl Moments {
    /// Checks shapes and finiteness. Symmetry and semidefiniteness are
    /// checked by the consumers that depend on them.
    pub fn new(mu: DVector<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        let m = mu.len();
        if m == 0 {
            return Err(Error::InvalidMoments("empty mean vector".into()));
        }
        if sigma.nrows() != m || sigma.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: sigma.nrows().max(sigma.ncols()),
            });
        }
        if mu.iter().chain(sigma.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidMoments("non-finite entry".into()));
        }
        Ok(Self { mu, sigma })
    }

    pub fn from_rows(mu: &[f64], sigma: &[&[f64]]) -> Result<Self> {
        let m = mu.len();
        if sigma.len() != m || sigma.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: sigma.len(),
            });
        }
        let sigma = DMatrix::from_fn(m, m, |i, j| sigma[i][j]);
        Self::new(DVector::from_column_slice(mu), sigma)
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// Largest absolute difference between `sigma[i][j]` and `sigma[j][i]`.
    pub fn max_asymmetry(&self) -> f64 {
        let m = self.dim();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in (i + 1)..m {
                worst = worst.max((self.sigma[(i, j)] - self.sigma[(j, i)]).abs());
            }
        }
        worst
    }

    /// `<b, mu>`.
    pub fn portfolio_mean(&self, b: &[f64]) -> f64 {
        b.iter().zip(self.mu.iter()).map(|(w, m)| w * m).sum()
    }

    /// `<b, sigma b>`.
    pub fn portfolio_variance(&self, b: &[f64]) -> f64 {
        let m = self.dim();
        let mut acc = 0.0;
        for i in 0..m {
            let mut row = 0.0;
            for j in 0..m {
                row += self.sigma[(i, j)] * b[j];
            }
            acc += b[i] * row;
        }
        acc
    }

    /// Mean-variance utility `<b, mu> - alpha <b, sigma b>`.
    pub fn utility(&self, alpha: RiskAversion, b: &[f64]) -> f64 {
        self.portfolio_mean(b) - alpha.value() * self.portfolio_variance(b)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
