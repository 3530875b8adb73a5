use crate::error::{Error, Result};
use crate::moments::MomentAccumulator;
use crate::solver::{MvProblem, SolveOptions};
use crate::strategies::{ConditionalOracle, Strategy};
use crate::types::{Portfolio, ReturnVector, RiskAversion};

/// Online mean-variance with a fixed risk aversion: uniform for the first
/// `h` periods, then the optimizer under the empirical moments of every
/// return seen so far.
#[derive(Clone, Debug)]
pub struct ConstantAlpha {
    alpha: RiskAversion,
    h: usize,
    acc: MomentAccumulator,
    last_portfolio: Portfolio,
    last_solved: bool,
    opts: SolveOptions,
}

impl ConstantAlpha {
    pub fn new(alpha: RiskAversion, h: usize, m: usize) -> Result<Self> {
        Self::with_options(alpha, h, m, SolveOptions::default())
    }

    pub fn with_options(
        alpha: RiskAversion,
        h: usize,
        m: usize,
        opts: SolveOptions,
    ) -> Result<Self> {
        if h == 0 {
            return Err(Error::Config("warm-up h must be >= 1".into()));
        }
        if m == 0 {
            return Err(Error::Config("need at least one asset".into()));
        }
        Ok(Self {
            alpha,
            h,
            acc: MomentAccumulator::new(m),
            last_portfolio: Portfolio::uniform(m),
            last_solved: false,
            opts,
        })
    }

    pub fn alpha(&self) -> RiskAversion {
        self.alpha
    }

    pub fn warm_up(&self) -> usize {
        self.h
    }

    pub fn accumulator(&self) -> &MomentAccumulator {
        &self.acc
    }

    pub fn last_portfolio(&self) -> &Portfolio {
        &self.last_portfolio
    }

    pub fn in_warm_up(&self) -> bool {
        self.acc.count() < self.h
    }
}

impl Strategy for ConstantAlpha {
    fn next_portfolio(&mut self, _: Option<&dyn ConditionalOracle>) -> Result<Portfolio> {
        self.last_solved = !self.in_warm_up();
        let b = if !self.last_solved {
            Portfolio::uniform(self.acc.dim())
        } else {
            let moments = self.acc.moments()?;
            MvProblem::new(&moments)?
                .solve(self.alpha, &self.opts, Some(&self.last_portfolio))?
                .portfolio
        };
        self.last_portfolio = b.clone();
        Ok(b)
    }

    fn observe(&mut self, x: &ReturnVector) -> Result<()> {
        self.acc.accumulate(x)
    }

    fn selected_alpha(&self) -> Option<RiskAversion> {
        self.last_solved.then_some(self.alpha)
    }
}
