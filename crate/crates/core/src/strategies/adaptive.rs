use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::MomentAccumulator;
use crate::solver::{MvProblem, SolveOptions};
use crate::strategies::{ConditionalOracle, Strategy};
use crate::types::{Moments, Portfolio, ReturnVector, RiskAversion};

/// Relative width of the band treated as the arg-max set of the objective.
pub const ARGMAX_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Distances to the anchor closer than this are treated as ties.
const DISTANCE_TIE_TOLERANCE: f64 = 1e-12;

/// Criterion used to rank the constant-alpha candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// `<b, mu> / sqrt(<b, sigma b>)` under the empirical moments.
    Sharpe,
    /// Sample mean of `log <b, x_i>` over the history.
    LogGrowth,
}

impl ObjectiveKind {
    /// Scores `b` against the empirical distribution held by `acc`.
    pub fn score(self, b: &Portfolio, moments: &Moments, acc: &MomentAccumulator) -> Result<f64> {
        match self {
            ObjectiveKind::Sharpe => {
                let mean = moments.portfolio_mean(b.weights());
                let var = moments.portfolio_variance(b.weights()).max(0.0);
                Ok(if var > 0.0 {
                    mean / var.sqrt()
                } else if mean > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                })
            }
            ObjectiveKind::LogGrowth => acc.expected_log(b),
        }
    }
}

/// Meta-strategy over a finite grid of risk aversions.
///
/// Each period every constant-alpha subroutine proposes its portfolio
/// (they share one history, so one accumulator serves all of them). The
/// proposals maximizing the objective form the arg-max set; among those
/// the one closest to the portfolio selected two periods earlier is
/// played, ties going to the smallest alpha.
#[derive(Clone, Debug)]
pub struct AdaptiveAlpha {
    alphas: Vec<RiskAversion>,
    objective: ObjectiveKind,
    h: usize,
    acc: MomentAccumulator,
    candidates: Vec<Portfolio>,
    /// Selections at `n - 1` and `n - 2`.
    selected_history: [Option<(Portfolio, Option<usize>)>; 2],
    opts: SolveOptions,
}

impl AdaptiveAlpha {
    pub fn new(
        alphas: Vec<RiskAversion>,
        objective: ObjectiveKind,
        h: usize,
        m: usize,
    ) -> Result<Self> {
        Self::with_options(alphas, objective, h, m, SolveOptions::default())
    }

    pub fn with_options(
        alphas: Vec<RiskAversion>,
        objective: ObjectiveKind,
        h: usize,
        m: usize,
        opts: SolveOptions,
    ) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Config("candidate alpha set is empty".into()));
        }
        if alphas.windows(2).any(|w| w[0].value() >= w[1].value()) {
            return Err(Error::Config(
                "candidate alphas must be strictly increasing".into(),
            ));
        }
        if h == 0 {
            return Err(Error::Config("warm-up h must be >= 1".into()));
        }
        if m == 0 {
            return Err(Error::Config("need at least one asset".into()));
        }
        Ok(Self {
            candidates: vec![Portfolio::uniform(m); alphas.len()],
            alphas,
            objective,
            h,
            acc: MomentAccumulator::new(m),
            selected_history: [None, None],
            opts,
        })
    }

    pub fn alphas(&self) -> &[RiskAversion] {
        &self.alphas
    }

    pub fn objective(&self) -> ObjectiveKind {
        self.objective
    }

    pub fn accumulator(&self) -> &MomentAccumulator {
        &self.acc
    }

    /// Index into [`Self::alphas`] of the last selection.
    pub fn selected_index(&self) -> Option<usize> {
        self.selected_history[0].as_ref().and_then(|(_, i)| *i)
    }

    /// Latest candidate proposal of every subroutine.
    pub fn candidates(&self) -> &[Portfolio] {
        &self.candidates
    }

    fn select(&mut self) -> Result<(Portfolio, usize)> {
        let moments = self.acc.moments()?;
        let problem = MvProblem::new(&moments)?;
        for (alpha, cand) in self.alphas.iter().zip(self.candidates.iter_mut()) {
            *cand = problem.solve(*alpha, &self.opts, Some(cand))?.portfolio;
        }
        let scores = self
            .candidates
            .iter()
            .map(|b| self.objective.score(b, &moments, &self.acc))
            .collect::<Result<Vec<f64>>>()?;
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let floor = if best.is_finite() {
            best - ARGMAX_RELATIVE_TOLERANCE * best.abs()
        } else {
            best
        };

        let m = self.acc.dim();
        let anchor = match &self.selected_history[1] {
            Some((b, _)) => b.clone(),
            None => Portfolio::uniform(m),
        };
        let mut chosen: Option<(usize, f64)> = None;
        for (i, score) in scores.iter().enumerate() {
            if *score < floor {
                continue;
            }
            let d = self.candidates[i].distance(&anchor);
            if chosen.is_none_or(|(_, best_d)| d < best_d - DISTANCE_TIE_TOLERANCE) {
                chosen = Some((i, d));
            }
        }
        let (i, _) = chosen.ok_or_else(|| {
            Error::InvalidMoments("no candidate has a comparable objective value".into())
        })?;
        Ok((self.candidates[i].clone(), i))
    }
}

impl Strategy for AdaptiveAlpha {
    fn next_portfolio(&mut self, _: Option<&dyn ConditionalOracle>) -> Result<Portfolio> {
        let (b, index) = if self.acc.count() < self.h {
            (Portfolio::uniform(self.acc.dim()), None)
        } else {
            let (b, i) = self.select()?;
            (b, Some(i))
        };
        self.selected_history.swap(0, 1);
        self.selected_history[0] = Some((b.clone(), index));
        Ok(b)
    }

    fn observe(&mut self, x: &ReturnVector) -> Result<()> {
        self.acc.accumulate(x)
    }

    fn selected_alpha(&self) -> Option<RiskAversion> {
        self.selected_index().map(|i| self.alphas[i])
    }
}
