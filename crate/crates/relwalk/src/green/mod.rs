//! Green functions `G(x, y | r) = sum_n r^n mu^{*n}(x^-1 y)`, their
//! derivatives, the spectral radius, spatial sums and sphere sums.

pub mod cauchy;
pub mod field;
pub mod radius;
pub mod series;
pub mod sphere;

use alloc::string::String;

pub use cauchy::{
    cauchy_sums, cauchy_sums_with, fk_coefficients, CauchySums, Residual, Truncation,
};
pub use field::{f_ratio, green_metrics, GreenField, GreenFunction};
pub use radius::{
    estimate_from_returns, spectral_radius, spectral_radius_with, SpectralRadiusEstimate,
};
pub use series::{
    green, green_coefficients, green_coefficients_with, green_derivative, green_derivative_with,
    green_with, GreenSeries, SeriesValue,
};
pub use sphere::{sphere_sums, SphereSumTable};

use crate::measures::MeasureError;

#[derive(Debug, Clone, thiserror::Error)]
pub enum GreenError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("no return to e up to n = {0}")]
    NoReturns(usize),
    #[error("outside the computed region: {0}")]
    Outside(String),
    #[error("unreachable at this truncation: {0}")]
    Unreachable(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}
