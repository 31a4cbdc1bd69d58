use alloc::vec;
use alloc::vec::Vec;

use super::GreenError;
use crate::engine::{
    ball_size, neumaier_sum, Executor, MemoryBudget, Sequential, WordBall, NODE_BYTES,
};
use crate::freeprod::GroupElement;
use crate::measures::{Measure, MeasureError};

/// A truncated power series evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    /// Sum of the computed terms.
    pub value: f64,
    pub terms: usize,
    /// Geometric extrapolation of the missing terms; infinite when the
    /// empirical term ratio is at least 1.
    pub tail: f64,
    pub last_term: f64,
    /// Empirical per-step ratio of the last two nonzero terms.
    pub ratio: f64,
    pub reliable: bool,
    pub divergent: bool,
}

impl SeriesValue {
    /// `cap` bounds the empirical ratio from above (typically `r / R_hat`).
    pub fn from_terms(terms: &[f64], cap: Option<f64>) -> Self {
        let value = neumaier_sum(terms);
        let mut nz = terms.iter().enumerate().rev().filter(|(_, t)| **t != 0.0);
        let last = nz.next();
        let prev = nz.next();
        let (ratio, gap, last_term) = match (last, prev) {
            (Some((j, &tj)), Some((i, &ti))) => {
                (libm::pow(tj / ti, 1.0 / (j - i) as f64), (j - i) as i32, tj)
            }
            (Some((_, &tj)), None) => (0.0, 1, tj),
            _ => (0.0, 1, 0.0),
        };
        let divergent = ratio > 1.0;
        let ratio = match cap {
            Some(c) if c < ratio => c,
            _ => ratio,
        };
        let tail = if ratio < 1.0 {
            let rp = libm::pow(ratio, gap as f64);
            last_term * rp / (1.0 - rp)
        } else {
            f64::INFINITY
        };
        SeriesValue {
            value,
            terms: terms.len(),
            tail,
            last_term,
            ratio,
            reliable: ratio <= 0.999,
            divergent,
        }
    }

    /// Value plus tail estimate.
    pub fn extrapolated(&self) -> f64 {
        self.value + self.tail
    }
}

/// Coefficients `c_n` of a power series in `r` with non-negative terms.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenSeries {
    pub coeffs: Vec<f64>,
}

impl GreenSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        GreenSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn value(&self, r: f64, cap: Option<f64>) -> SeriesValue {
        self.derivative(r, 0, cap)
    }

    /// Term-wise `k`-th derivative in `r`.
    pub fn derivative(&self, r: f64, k: usize, cap: Option<f64>) -> SeriesValue {
        let terms: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(k)
            .map(|(n, &c)| falling(n, k) * c * libm::pow(r, (n - k) as f64))
            .collect();
        SeriesValue::from_terms(&terms, cap)
    }
}

/// `n (n-1) ... (n-k+1)`.
pub(crate) fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

/// `mu^{*n}(g)` for every target `g` and `n = 0..=n`.
pub fn green_coefficients(
    m: &Measure,
    targets: &[GroupElement],
    n: usize,
) -> Result<Vec<GreenSeries>, GreenError> {
    green_coefficients_with(m, targets, n, MemoryBudget::DEFAULT, &Sequential)
}

pub fn green_coefficients_with<E: Executor>(
    m: &Measure,
    targets: &[GroupElement],
    n: usize,
    budget: MemoryBudget,
    exec: &E,
) -> Result<Vec<GreenSeries>, GreenError> {
    let spec = m.group();
    for g in targets {
        spec.check_element(g).map_err(MeasureError::from)?;
    }
    let d = m.support_radius();
    let reach = targets
        .iter()
        .map(|g| spec.word_len(g) as u32)
        .max()
        .unwrap_or(0);
    let radius = move |t: usize| (t as u32 * d).min(reach + (n - t) as u32 * d);
    let w = (0..=n).map(radius).max().unwrap_or(0).max(reach);
    if !budget.fits(ball_size(spec, w).saturating_mul((NODE_BYTES + 16) as u128)) {
        return Err(MeasureError::Budget {
            largest_completed: 0,
            partial: None,
        }
        .into());
    }
    let ball = WordBall::new(spec, w, d);
    let nodes: Vec<u32> = targets
        .iter()
        .map(|g| ball.locate(g).expect("target inside the ball"))
        .collect();
    let terms = forward_terms(m);
    let mut out = vec![vec![0.0; n + 1]; targets.len()];
    crate::measures::run_walk(exec, &ball, &terms, 1.0f64, n, radius, |t, s| {
        for (row, &v) in out.iter_mut().zip(&nodes) {
            row[t] = s[v as usize];
        }
    })
    .expect("floats do not overflow");
    Ok(out.into_iter().map(GreenSeries::new).collect())
}

/// Pull terms `(mu(s), s^-1)` that move a distribution forward one step.
pub(crate) fn forward_terms(m: &Measure) -> Vec<(f64, GroupElement)> {
    let spec = m.group();
    m.support()
        .iter()
        .enumerate()
        .map(|(i, g)| (m.weight_f64(i), spec.inv(g)))
        .collect()
}

/// Pull terms `(mu(s), s)`: one application of the Markov operator.
pub(crate) fn operator_terms(m: &Measure) -> Vec<(f64, GroupElement)> {
    m.support()
        .iter()
        .enumerate()
        .map(|(i, g)| (m.weight_f64(i), g.clone()))
        .collect()
}

/// Partial sum of `G(x, y | r)` to order `n`.
pub fn green(
    m: &Measure,
    x: &GroupElement,
    y: &GroupElement,
    r: f64,
    n: usize,
) -> Result<SeriesValue, GreenError> {
    green_with(m, x, y, r, n, None, MemoryBudget::DEFAULT, &Sequential)
}

#[allow(clippy::too_many_arguments)]
pub fn green_with<E: Executor>(
    m: &Measure,
    x: &GroupElement,
    y: &GroupElement,
    r: f64,
    n: usize,
    r_hat: Option<f64>,
    budget: MemoryBudget,
    exec: &E,
) -> Result<SeriesValue, GreenError> {
    green_derivative_with(m, x, y, r, 0, n, r_hat, budget, exec)
}

pub fn green_derivative(
    m: &Measure,
    x: &GroupElement,
    y: &GroupElement,
    r: f64,
    k: usize,
    n: usize,
) -> Result<SeriesValue, GreenError> {
    green_derivative_with(m, x, y, r, k, n, None, MemoryBudget::DEFAULT, &Sequential)
}

#[allow(clippy::too_many_arguments)]
pub fn green_derivative_with<E: Executor>(
    m: &Measure,
    x: &GroupElement,
    y: &GroupElement,
    r: f64,
    k: usize,
    n: usize,
    r_hat: Option<f64>,
    budget: MemoryBudget,
    exec: &E,
) -> Result<SeriesValue, GreenError> {
    if r.is_nan() || r < 0.0 {
        return Err(GreenError::Invalid(alloc::format!("r = {r}")));
    }
    let spec = m.group();
    let g = spec
        .multiply(&spec.inverse(x).map_err(MeasureError::from)?, y)
        .map_err(MeasureError::from)?;
    let series = green_coefficients_with(m, &[g], n, budget, exec)?
        .pop()
        .expect("one target");
    let cap = r_hat.map(|rh| r / rh);
    let v = series.derivative(r, k, cap);
    Ok(v)
}
