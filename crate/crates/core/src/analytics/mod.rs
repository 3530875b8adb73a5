//! Closed-form and quadrature quantities for Gaussian portfolio returns,
//! and efficient-frontier sweeps.

mod frontier;
mod quadrature;
mod series;

pub use frontier::{frontier_sweep, FrontierPoint};
pub use quadrature::{gauss_hermite, normal_expected_log_quadrature, GaussHermite};
pub use series::{normal_log_series, SeriesValue, MAX_SERIES_RATIO};
