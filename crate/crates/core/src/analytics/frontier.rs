use crate::analytics::series::{normal_log_series, MAX_SERIES_RATIO};
use crate::error::{Error, Result};
use crate::solver::{MvProblem, SolveOptions};
use crate::types::{Moments, Portfolio, ReturnVector, RiskAversion};

const SERIES_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FrontierPoint {
    pub alpha: RiskAversion,
    pub portfolio: Portfolio,
    pub mean: f64,
    pub variance: f64,
    /// `+inf` for a riskless portfolio with positive mean.
    pub sharpe: f64,
    /// Normal-approximation series when its ratio precondition holds,
    /// otherwise the sample average over `history`; `None` if neither
    /// is available.
    pub expected_log: Option<f64>,
}

/// Mean-variance optima for each `alpha`, with their mean, variance,
/// Sharpe ratio and expected log-return.
pub fn frontier_sweep(
    moments: &Moments,
    alphas: &[RiskAversion],
    history: Option<&[ReturnVector]>,
) -> Result<Vec<FrontierPoint>> {
    if alphas.windows(2).any(|w| w[0].value() >= w[1].value()) {
        return Err(Error::InvalidArgument(
            "alphas must be strictly increasing".into(),
        ));
    }
    let problem = MvProblem::new(moments)?;
    let opts = SolveOptions::default();
    let mut warm: Option<Portfolio> = None;
    let mut points = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let b = problem.solve(alpha, &opts, warm.as_ref())?.portfolio;
        let mean = moments.portfolio_mean(b.weights());
        let variance = moments.portfolio_variance(b.weights()).max(0.0);
        let sharpe = if variance > 0.0 {
            mean / variance.sqrt()
        } else {
            f64::INFINITY
        };
        let sd = variance.sqrt();
        let expected_log = if mean > 0.0 && sd / mean < MAX_SERIES_RATIO {
            Some(normal_log_series(mean, sd, SERIES_TOLERANCE)?.value)
        } else {
            history
                .filter(|h| !h.is_empty())
                .map(|h| h.iter().map(|x| b.gross_return(x).ln()).sum::<f64>() / h.len() as f64)
        };
        points.push(FrontierPoint {
            alpha,
            portfolio: b.clone(),
            mean,
            variance,
            sharpe,
            expected_log,
        });
        warm = Some(b);
    }
    Ok(points)
}
