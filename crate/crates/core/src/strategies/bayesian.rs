use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::solver::{solve_mv, SolveOptions};
use crate::strategies::{ConditionalOracle, Strategy};
use crate::types::{Moments, Portfolio, ReturnVector, RiskAversion};

/// Mean-variance optimizer under the true conditional law of the next
/// return.
pub fn bayesian_next(oracle_moments: &Moments, alpha: RiskAversion) -> Result<Portfolio> {
    Ok(solve_mv(alpha, oracle_moments, &SolveOptions::default())?.portfolio)
}

/// Oracle strategy: plays [`bayesian_next`] on the conditional moments
/// supplied by the market. Only available on synthetic markets. Solutions
/// are cached per conditional law.
#[derive(Clone, Debug)]
pub struct BayesianOracle {
    alpha: RiskAversion,
    opts: SolveOptions,
    cache: HashMap<u64, Portfolio>,
}

impl BayesianOracle {
    pub fn new(alpha: RiskAversion) -> Self {
        Self::with_options(alpha, SolveOptions::default())
    }

    pub fn with_options(alpha: RiskAversion, opts: SolveOptions) -> Self {
        Self {
            alpha,
            opts,
            cache: HashMap::new(),
        }
    }

    pub fn alpha(&self) -> RiskAversion {
        self.alpha
    }
}

impl Strategy for BayesianOracle {
    fn next_portfolio(&mut self, oracle: Option<&dyn ConditionalOracle>) -> Result<Portfolio> {
        let oracle = oracle.ok_or_else(|| {
            Error::Config(
                "the bayesian strategy needs a market with a known conditional law".into(),
            )
        })?;
        let key = oracle.conditional_key();
        if let Some(b) = self.cache.get(&key) {
            return Ok(b.clone());
        }
        let moments = oracle.conditional_moments()?;
        let b = solve_mv(self.alpha, &moments, &self.opts)?.portfolio;
        self.cache.insert(key, b.clone());
        Ok(b)
    }

    fn observe(&mut self, _: &ReturnVector) -> Result<()> {
        Ok(())
    }

    fn selected_alpha(&self) -> Option<RiskAversion> {
        Some(self.alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(Moments);

    impl ConditionalOracle for Fixed {
        fn conditional_key(&self) -> u64 {
            0
        }

        fn conditional_moments(&self) -> Result<Moments> {
            Ok(self.0.clone())
        }
    }

    #[test]
    fn symmetric_law_gives_uniform() {
        let m = Moments::from_rows(&[1.0, 1.0], &[&[0.01, -0.002], &[-0.002, 0.01]]).unwrap();
        let b = bayesian_next(&m, RiskAversion::new(1.0).unwrap()).unwrap();
        assert!((b.weights()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_law_gives_constant_portfolio() {
        let m = Moments::from_rows(&[1.1, 1.0], &[&[0.04, 0.0], &[0.0, 0.01]]).unwrap();
        let oracle = Fixed(m.clone());
        let mut s = BayesianOracle::new(RiskAversion::new(2.0).unwrap());
        let first = s.next_portfolio(Some(&oracle)).unwrap();
        for _ in 0..5 {
            assert_eq!(s.next_portfolio(Some(&oracle)).unwrap(), first);
        }
        assert_eq!(
            first,
            bayesian_next(&m, RiskAversion::new(2.0).unwrap()).unwrap()
        );
    }

    #[test]
    fn needs_an_oracle() {
        let mut s = BayesianOracle::new(RiskAversion::new(1.0).unwrap());
        assert!(matches!(s.next_portfolio(None), Err(Error::Config(_))));
    }
}
