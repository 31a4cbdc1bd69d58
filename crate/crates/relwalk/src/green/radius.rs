use alloc::vec::Vec;

use super::GreenError;
use crate::engine::{Executor, MemoryBudget, Sequential};
use crate::measures::{return_sequence_with, Measure, MeasureError};

/// Estimate of the spectral radius `R_mu` (radius of convergence of `G`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRadiusEstimate {
    /// `R_mu <= certified_upper`, from `q_{2n}^{-1/2n}` at every computed `n`.
    pub certified_upper: f64,
    /// Extrapolated `R_hat`; only for symmetric measures.
    pub point: Option<f64>,
    /// `q_{2n}^{1/2n}` for `n = 1, 2, ...` (zero where `q_{2n} = 0`).
    pub diagnostics: Vec<f64>,
    /// `q_{2n+2} / q_{2n}` for `n = 1, 2, ...`.
    pub ratios: Vec<f64>,
    /// Richardson limits of `ratios` at orders `0, 1, 2, ...`, as
    /// estimates of `1 / R_mu`.
    pub extrapolations: Vec<f64>,
    pub n_max: usize,
}

/// Richardson order used for the point estimate.
pub const RICHARDSON_ORDER: usize = 6;

impl SpectralRadiusEstimate {
    /// The point estimate, or the certified bound when there is none.
    pub fn r_hat(&self) -> f64 {
        self.point.unwrap_or(self.certified_upper)
    }

    /// Estimate of `1 / R_mu`.
    pub fn inverse(&self) -> f64 {
        1.0 / self.r_hat()
    }

    /// Spread of the last two Richardson orders, as a rough error bar on
    /// `1 / R_hat`.
    pub fn spread(&self) -> f64 {
        match self.extrapolations.len() {
            0 | 1 => f64::INFINITY,
            n => (self.extrapolations[n - 1] - self.extrapolations[n - 2]).abs(),
        }
    }
}

/// Order-`k` Richardson limit of a sequence `a_n = a + b/n + c/n^2 + ...`
/// from its last `k + 1` entries; `a[i]` is the term of index `first + i`.
pub fn richardson(a: &[f64], first: usize, k: usize) -> f64 {
    assert!(a.len() > k, "need {} terms", k + 1);
    let start = a.len() - 1 - k;
    let mut sum = 0.0;
    let mut fact = [1.0f64; 32];
    for i in 1..32 {
        fact[i] = fact[i - 1] * i as f64;
    }
    for j in 0..=k {
        let n = (first + start + j) as f64;
        let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * a[start + j] * libm::pow(n, k as f64) / (fact[j] * fact[k - j]);
    }
    sum
}

pub fn spectral_radius(m: &Measure, n_max: usize) -> Result<SpectralRadiusEstimate, GreenError> {
    spectral_radius_with(m, n_max, MemoryBudget::DEFAULT, &Sequential)
}

pub fn spectral_radius_with<E: Executor>(
    m: &Measure,
    n_max: usize,
    budget: MemoryBudget,
    exec: &E,
) -> Result<SpectralRadiusEstimate, GreenError> {
    let seq = match return_sequence_with(&m.to_float(), n_max, budget, exec) {
        Ok(s) => s,
        Err(MeasureError::Budget {
            partial: Some(p), ..
        }) if p.n_max() >= 4 => p,
        Err(e) => return Err(e.into()),
    };
    estimate_from_returns(&seq.values, m.is_symmetric())
}

/// Builds the estimate from `q_0..q_n`.
pub fn estimate_from_returns(
    q: &[f64],
    symmetric: bool,
) -> Result<SpectralRadiusEstimate, GreenError> {
    let n_max = q.len().saturating_sub(1);
    let diagnostics: Vec<f64> = (1..=n_max / 2)
        .map(|n| {
            if q[2 * n] > 0.0 {
                libm::pow(q[2 * n], 0.5 / n as f64)
            } else {
                0.0
            }
        })
        .collect();
    let best = diagnostics.iter().copied().fold(0.0f64, f64::max);
    if best <= 0.0 {
        return Err(GreenError::NoReturns(n_max));
    }
    let certified_upper = 1.0 / best;
    let ratios: Vec<f64> = (1..n_max / 2)
        .take_while(|&n| q[2 * n] > 0.0)
        .map(|n| q[2 * n + 2] / q[2 * n])
        .collect();
    let mut extrapolations = Vec::new();
    for k in 0..=RICHARDSON_ORDER.min(ratios.len().saturating_sub(1)) {
        let lim = richardson(&ratios, 1, k);
        extrapolations.push(libm::sqrt(lim.max(0.0)));
    }
    let point = if symmetric && !extrapolations.is_empty() {
        let inv = *extrapolations.last().expect("nonempty");
        (inv > 0.0).then(|| 1.0 / inv)
    } else {
        None
    };
    Ok(SpectralRadiusEstimate {
        certified_upper,
        point,
        diagnostics,
        ratios,
        extrapolations,
        n_max,
    })
}
