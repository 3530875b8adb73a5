//! Mean-variance optimization over the simplex.
//!
//! Maximizes `L(b) = <b, mu> - alpha <b, sigma b>` subject to `b >= 0`,
//! `sum(b) = 1`. For `alpha > 0` the solver runs projected-gradient ascent
//! with exact Euclidean projection onto the simplex and a fixed step
//! `1 / (2 alpha lambda_max + 1)`. Whenever the iterate's support is stable
//! the equality-constrained problem on that support is solved directly; if
//! the result is feasible and passes the KKT certificate it is accepted.
//! For `alpha = 0` the problem is linear and is solved by inspecting the
//! vertices.
//!
//! When the optimizer set is not a singleton (tied means at `alpha = 0`, or
//! a singular covariance) the minimum-norm element of the optimal face is
//! returned. The optimal face is `{b in simplex : b - b* in N}` where
//! `N = ker(alpha sigma) ∩ {1, mu}^⊥`, and its minimum-norm element is found
//! with Dykstra's alternating projections.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::moments::SYMMETRY_TOLERANCE;
use crate::types::{Moments, Portfolio, RiskAversion};

/// Smallest eigenvalue accepted as "positive semidefinite".
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Weights at or below this are treated as round-off in final solutions.
const SNAP_THRESHOLD: f64 = 1e-12;

/// Rule used to pick one element of a non-singleton optimizer set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    #[default]
    MinNorm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub max_iterations: usize,
    pub kkt_tolerance: f64,
    pub tie_break: TieBreak,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            kkt_tolerance: 1e-9,
            tie_break: TieBreak::MinNorm,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be >= 1".into()));
        }
        if !(self.kkt_tolerance > 0.0) {
            return Err(Error::InvalidArgument("kkt_tolerance must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub portfolio: Portfolio,
    pub utility: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
}

/// Gradient `mu - 2 alpha sigma b` of the utility.
fn gradient(alpha: f64, m: &Moments, b: &[f64], out: &mut [f64]) {
    let n = b.len();
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += m.sigma[(i, j)] * b[j];
        }
        out[i] = m.mu[i] - 2.0 * alpha * row;
    }
}

fn residual_from_gradient(b: &[f64], g: &[f64]) -> f64 {
    let lambda = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    b.iter()
        .zip(g)
        .map(|(bj, gj)| bj * (lambda - gj) + (gj - lambda).max(0.0))
        .fold(0.0, f64::max)
}

/// Stationarity / complementary-slackness violation of `b` for the simplex
/// constrained problem. Zero exactly at optimizers.
pub fn kkt_residual(b: &Portfolio, alpha: RiskAversion, m: &Moments) -> f64 {
    let mut g = vec![0.0; b.dim()];
    gradient(alpha.value(), m, b.weights(), &mut g);
    residual_from_gradient(b.weights(), &g)
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// A validated problem instance whose spectral decomposition is shared by
/// every solve on the same moments (e.g. a sweep over risk aversions).
#[derive(Clone, Debug)]
pub struct MvProblem<'a> {
    moments: &'a Moments,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    lambda_max: f64,
}

impl<'a> MvProblem<'a> {
    pub fn new(moments: &'a Moments) -> Result<Self> {
        let max_asymmetry = moments.max_asymmetry();
        if max_asymmetry > SYMMETRY_TOLERANCE {
            return Err(Error::Asymmetric { max_asymmetry });
        }
        let eig = SymmetricEigen::new(moments.sigma.clone());
        let lambda_min = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if lambda_min < -PSD_TOLERANCE {
            return Err(Error::InvalidMoments(format!(
                "covariance is not positive semidefinite (min eigenvalue {lambda_min:e})"
            )));
        }
        let lambda_max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            moments,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            lambda_max,
        })
    }

    pub fn moments(&self) -> &Moments {
        self.moments
    }

    pub fn solve(
        &self,
        alpha: RiskAversion,
        opts: &SolveOptions,
        warm_start: Option<&Portfolio>,
    ) -> Result<SolveResult> {
        opts.validate()?;
        let m = self.moments.dim();
        if let Some(w) = warm_start {
            if w.dim() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: w.dim(),
                });
            }
        }
        let (b, iterations) = if alpha.value() == 0.0 {
            (self.best_vertices(), 1)
        } else {
            self.projected_gradient(alpha.value(), opts, warm_start)?
        };
        let b = match opts.tie_break {
            TieBreak::MinNorm if alpha.value() == 0.0 => b,
            TieBreak::MinNorm => self.min_norm_on_face(alpha, b, opts),
        };
        let portfolio = self.snap(alpha, Portfolio::renormalized(b), opts);
        Ok(SolveResult {
            utility: self.moments.utility(alpha, portfolio.weights()),
            kkt_residual: kkt_residual(&portfolio, alpha, self.moments),
            portfolio,
            iterations,
        })
    }

    /// Zeroes round-off sized weights when the certificate still holds.
    fn snap(&self, alpha: RiskAversion, b: Portfolio, opts: &SolveOptions) -> Portfolio {
        if b.weights().iter().all(|w| *w == 0.0 || *w > SNAP_THRESHOLD) {
            return b;
        }
        let snapped = Portfolio::renormalized(
            b.weights()
                .iter()
                .map(|w| if *w > SNAP_THRESHOLD { *w } else { 0.0 })
                .collect(),
        );
        if kkt_residual(&snapped, alpha, self.moments) <= opts.kkt_tolerance {
            snapped
        } else {
            b
        }
    }

    /// Uniform weights over the assets attaining the largest mean.
    fn best_vertices(&self) -> Vec<f64> {
        let mu = &self.moments.mu;
        let best = mu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-12 * best.abs().max(1.0);
        let tied: Vec<bool> = mu.iter().map(|v| *v >= best - tol).collect();
        let count = tied.iter().filter(|t| **t).count() as f64;
        tied.iter()
            .map(|t| if *t { 1.0 / count } else { 0.0 })
            .collect()
    }

    fn projected_gradient(
        &self,
        alpha: f64,
        opts: &SolveOptions,
        warm_start: Option<&Portfolio>,
    ) -> Result<(Vec<f64>, usize)> {
        let m = self.moments.dim();
        let step = 1.0 / (2.0 * alpha * self.lambda_max + 1.0);
        let mut b = match warm_start {
            Some(w) => w.weights().to_vec(),
            None => vec![1.0 / m as f64; m],
        };
        let mut g = vec![0.0; m];
        let mut best = (b.clone(), f64::INFINITY);
        let mut prev_support: Vec<bool> = Vec::new();
        let mut polished_support: Vec<bool> = Vec::new();

        for it in 0..opts.max_iterations {
            gradient(alpha, self.moments, &b, &mut g);
            let r = residual_from_gradient(&b, &g);
            if r < best.1 {
                best = (b.clone(), r);
            }
            if r <= opts.kkt_tolerance {
                return Ok((b, it + 1));
            }

            let support: Vec<bool> = b.iter().map(|w| *w > 0.0).collect();
            if (it == 0 || support == prev_support) && support != polished_support {
                if let Some(candidate) = self.solve_on_support(alpha, &support) {
                    let mut gc = vec![0.0; m];
                    gradient(alpha, self.moments, &candidate, &mut gc);
                    let rc = residual_from_gradient(&candidate, &gc);
                    if rc <= opts.kkt_tolerance {
                        return Ok((candidate, it + 1));
                    }
                    if rc < best.1 {
                        best = (candidate, rc);
                    }
                }
                polished_support = support.clone();
            }
            prev_support = support;

            let y: Vec<f64> = b.iter().zip(&g).map(|(bj, gj)| bj + step * gj).collect();
            b = project_simplex(&y);
        }
        Err(Error::ConvergenceFailure {
            best: Portfolio::renormalized(best.0),
            residual: best.1,
            iterations: opts.max_iterations,
        })
    }

    /// Solves the KKT system restricted to `support`:
    /// `2 alpha sigma_SS b_S + lambda 1 = mu_S`, `1' b_S = 1`.
    /// Returns `None` when the solution leaves the non-negative orthant.
    fn solve_on_support(&self, alpha: f64, support: &[bool]) -> Option<Vec<f64>> {
        let idx: Vec<usize> = (0..support.len()).filter(|&j| support[j]).collect();
        let s = idx.len();
        if s == 0 {
            return None;
        }
        let sigma = &self.moments.sigma;
        let kkt = DMatrix::from_fn(s + 1, s + 1, |i, j| match (i < s, j < s) {
            (true, true) => 2.0 * alpha * sigma[(idx[i], idx[j])],
            (true, false) | (false, true) => 1.0,
            (false, false) => 0.0,
        });
        let rhs = DVector::from_fn(
            s + 1,
            |i, _| if i < s { self.moments.mu[idx[i]] } else { 1.0 },
        );
        let sol = kkt
            .clone()
            .lu()
            .solve(&rhs)
            .filter(|x| x.iter().all(|v| v.is_finite()))
            .or_else(|| kkt.svd(true, true).solve(&rhs, 1e-13).ok())?;

        let mut b = vec![0.0; support.len()];
        for (k, &j) in idx.iter().enumerate() {
            if sol[k] < -1e-12 || !sol[k].is_finite() {
                return None;
            }
            b[j] = sol[k].max(0.0);
        }
        let total: f64 = b.iter().sum();
        if total <= 0.0 {
            return None;
        }
        b.iter_mut().for_each(|w| *w /= total);
        Some(b)
    }

    /// Moves `b` to the minimum-norm point of the optimal face it lies on.
    fn min_norm_on_face(&self, alpha: RiskAversion, b: Vec<f64>, opts: &SolveOptions) -> Vec<f64> {
        let m = self.moments.dim();
        let a = alpha.value();
        // Orthonormal basis of ker(alpha sigma).
        let null_tol = 1e-12 * self.lambda_max;
        let null_cols: Vec<usize> = if a == 0.0 {
            (0..m).collect()
        } else {
            (0..m)
                .filter(|&k| self.eigenvalues[k] <= null_tol)
                .collect()
        };
        if null_cols.is_empty() {
            return b;
        }
        let basis = if a == 0.0 {
            DMatrix::identity(m, m)
        } else {
            self.eigenvectors.select_columns(&null_cols)
        };
        let k = basis.ncols();

        // Remove directions that change the budget or the mean.
        let ones = DVector::from_element(m, 1.0);
        let mut constraint_dirs: Vec<DVector<f64>> = Vec::new();
        for c in [basis.tr_mul(&ones), basis.tr_mul(&self.moments.mu)] {
            let scale = c.norm().max(1.0);
            let mut v = c;
            for q in &constraint_dirs {
                let proj = q.dot(&v);
                v.axpy(-proj, q, 1.0);
            }
            let norm = v.norm();
            if norm > 1e-10 * scale {
                constraint_dirs.push(v / norm);
            }
        }
        if constraint_dirs.len() >= k {
            return b;
        }

        let project_null = |v: &DVector<f64>| -> DVector<f64> {
            let mut coeffs = basis.tr_mul(v);
            for q in &constraint_dirs {
                let proj = q.dot(&coeffs);
                coeffs.axpy(-proj, q, 1.0);
            }
            &basis * coeffs
        };
        let anchor = DVector::from_column_slice(&b);
        let project_face =
            |x: &DVector<f64>| -> DVector<f64> { &anchor + project_null(&(x - &anchor)) };

        // Dykstra: project the origin onto (anchor + N) ∩ R^m_+.
        let mut x = DVector::zeros(m);
        let mut p = DVector::zeros(m);
        let mut q = DVector::zeros(m);
        for _ in 0..20_000 {
            let y = project_face(&(&x + &p));
            p = &x + &p - &y;
            let z = (&y + &q).map(|v| v.max(0.0));
            q = &y + &q - &z;
            let change = (&z - &x).amax();
            x = z;
            if change < 1e-15 {
                break;
            }
        }
        let y = project_face(&x);
        if y.iter().any(|v| *v < -1e-10) {
            return b;
        }
        let candidate = Portfolio::renormalized(y.iter().copied().collect());
        let before = self.moments.utility(alpha, &b);
        let after = self.moments.utility(alpha, candidate.weights());
        if after >= before - opts.kkt_tolerance
            && kkt_residual(&candidate, alpha, self.moments) <= opts.kkt_tolerance
        {
            candidate.weights().to_vec()
        } else {
            b
        }
    }
}

/// Maximizes the mean-variance utility over the simplex.
pub fn solve_mv(alpha: RiskAversion, m: &Moments, opts: &SolveOptions) -> Result<SolveResult> {
    MvProblem::new(m)?.solve(alpha, opts, None)
}

/// Exhaustive search over the lattice `{b : b_j = k * grid_step, sum b = 1}`.
pub fn brute_force_mv(alpha: RiskAversion, m: &Moments, grid_step: f64) -> Result<SolveResult> {
    let dim = m.dim();
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "grid_step {grid_step} not in (0, 1]"
        )));
    }
    let steps = (1.0 / grid_step).round();
    if (steps * grid_step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "grid_step {grid_step} does not divide 1"
        )));
    }
    if dim > 4 {
        return Err(Error::ResourceLimit(format!(
            "brute force limited to m <= 4, got {dim}"
        )));
    }
    let steps = steps as usize;
    // C(steps + dim - 1, dim - 1) lattice points.
    let points = (1..dim).fold(1.0f64, |acc, i| acc * (steps + i) as f64 / i as f64);
    if points > 2e7 {
        return Err(Error::ResourceLimit(format!(
            "{points:.0} lattice points exceed the 2e7 budget"
        )));
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut counts = vec![0usize; dim];
    let mut weights = vec![0.0; dim];
    fn visit(
        j: usize,
        remaining: usize,
        steps: usize,
        counts: &mut [usize],
        weights: &mut [f64],
        eval: &mut dyn FnMut(&[f64]),
    ) {
        let last = counts.len() - 1;
        if j == last {
            counts[j] = remaining;
            for (w, c) in weights.iter_mut().zip(counts.iter()) {
                *w = *c as f64 / steps as f64;
            }
            eval(weights);
            return;
        }
        for c in 0..=remaining {
            counts[j] = c;
            visit(j + 1, remaining - c, steps, counts, weights, eval);
        }
    }
    let mut eval = |b: &[f64]| {
        let u = m.utility(alpha, b);
        if best.as_ref().is_none_or(|(bu, _)| u > *bu) {
            best = Some((u, b.to_vec()));
        }
    };
    visit(0, steps, steps, &mut counts, &mut weights, &mut eval);
    let (utility, b) = best.expect("lattice is non-empty");
    let portfolio = Portfolio::renormalized(b);
    Ok(SolveResult {
        kkt_residual: kkt_residual(&portfolio, alpha, m),
        utility,
        portfolio,
        iterations: points as usize,
    })
}
