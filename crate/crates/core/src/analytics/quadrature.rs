use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights for `int f(x) exp(-x^2) dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `n`-point Gauss-Hermite rule, by Newton iteration on the orthonormal
/// Hermite recurrence.
pub fn gauss_hermite(n: usize) -> Result<GaussHermite> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one node".into()));
    }
    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 3e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::InvalidArgument(format!(
                "Gauss-Hermite node {i} of {n} did not converge"
            )));
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    Ok(GaussHermite {
        nodes: x,
        weights: w,
    })
}

/// `E log(mu + sigma Z)` for standard normal `Z` by Gauss-Hermite
/// quadrature. Nodes where the argument is non-positive are dropped, so
/// the result is only meaningful when that mass is negligible.
pub fn normal_expected_log_quadrature(rule: &GaussHermite, mu: f64, sigma: f64) -> f64 {
    let scale = std::f64::consts::SQRT_2 * sigma;
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .filter_map(|(x, w)| {
            let arg = mu + scale * x;
            (arg > 0.0).then(|| w * arg.ln())
        })
        .sum::<f64>()
        / PI.sqrt()
}
