//! Streaming empirical moments.
//!
//! [`MomentAccumulator`] represents the empirical distribution of every
//! return observed so far: a Welford-style running mean and scatter matrix
//! for the first two moments, plus the full observation history for
//! functionals (such as the expected log-return) that need more than two
//! moments. Repeated observations are additionally indexed as weighted
//! atoms so that sample averages over discrete markets cost O(#atoms)
//! rather than O(n).

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::types::{Moments, Portfolio, ReturnVector};

/// Symmetry tolerance accepted by [`min_eigenvalue`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
struct Atom {
    first: usize,
    count: usize,
}

#[derive(Clone, Debug)]
pub struct MomentAccumulator {
    n: usize,
    mean: DVector<f64>,
    scatter: DMatrix<f64>,
    history: Vec<ReturnVector>,
    atoms: Vec<Atom>,
    atom_index: HashMap<Vec<u64>, usize>,
}

impl MomentAccumulator {
    pub fn new(m: usize) -> Self {
        Self {
            n: 0,
            mean: DVector::zeros(m),
            scatter: DMatrix::zeros(m, m),
            history: Vec::new(),
            atoms: Vec::new(),
            atom_index: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn history(&self) -> &[ReturnVector] {
        &self.history
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn scatter(&self) -> &DMatrix<f64> {
        &self.scatter
    }

    /// Rank-one Welford update with `x`.
    pub fn accumulate(&mut self, x: &ReturnVector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        self.n += 1;
        let n = self.n as f64;
        let delta = x.to_dvector() - &self.mean;
        self.mean.axpy(1.0 / n, &delta, 1.0);
        // delta * delta^T is exactly symmetric in floating point.
        self.scatter.ger((n - 1.0) / n, &delta, &delta, 1.0);

        let key: Vec<u64> = x.as_slice().iter().map(|v| v.to_bits()).collect();
        match self.atom_index.get(&key) {
            Some(&a) => self.atoms[a].count += 1,
            None => {
                self.atom_index.insert(key, self.atoms.len());
                self.atoms.push(Atom {
                    first: self.history.len(),
                    count: 1,
                });
            }
        }
        self.history.push(x.clone());
        Ok(())
    }

    /// Mean and population covariance (scatter / n).
    pub fn moments(&self) -> Result<Moments> {
        if self.n == 0 {
            return Err(Error::EmptyAccumulator);
        }
        Moments::new(self.mean.clone(), &self.scatter / self.n as f64)
    }

    /// Number of distinct observations seen so far.
    pub fn distinct_count(&self) -> usize {
        self.atoms.len()
    }

    /// Sample mean of `log <b, x_i>` over the history.
    pub fn expected_log(&self, b: &Portfolio) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::EmptyAccumulator);
        }
        let mut total = 0.0;
        for atom in &self.atoms {
            let r = b.gross_return(&self.history[atom.first]);
            total += atom.count as f64 * r.ln();
        }
        Ok(total / self.n as f64)
    }
}

/// Smallest eigenvalue of the covariance matrix.
pub fn min_eigenvalue(m: &Moments) -> Result<f64> {
    let max_asymmetry = m.max_asymmetry();
    if max_asymmetry > SYMMETRY_TOLERANCE {
        return Err(Error::Asymmetric { max_asymmetry });
    }
    let eig = SymmetricEigen::new(m.sigma.clone());
    Ok(eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

/// True when the covariance matrix is positive definite beyond `tolerance`.
pub fn is_non_redundant(m: &Moments, tolerance: f64) -> Result<bool> {
    Ok(min_eigenvalue(m)? > tolerance)
}
