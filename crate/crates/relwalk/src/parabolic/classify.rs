//! Spectral degeneracy, divergence, Green moments and positive recurrence.
//!
//! All three verdicts are finite-budget heuristics and carry the series
//! they were read from.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::model::{ParabolicModel, ParabolicRadius};
use super::{ParabolicBudget, ParabolicError};
use crate::engine::Executor;
use crate::freeprod::FactorId;
use crate::green::GreenSeries;
use crate::measures::{validate_with, Measure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentsVerdict {
    Finite,
    Infinite,
    Inconclusive,
}

/// Radii inside this band are too close to 1 to call.
pub const DEGENERACY_BAND: (f64, f64) = (1.0 - 1e-3, 1.0 + 5e-3);
/// Fitted blow-up exponents of `G'` above this are divergent.
pub const DIVERGENT_SLOPE: f64 = 0.25;
/// Fitted blow-up exponents below this are convergent.
pub const CONVERGENT_SLOPE: f64 = 0.05;
/// Increment ratios on the moment ladder.
pub const FINITE_INCREMENT: f64 = 0.7;
pub const INFINITE_INCREMENT: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyBudget {
    pub parabolic: ParabolicBudget,
    /// Kernel powers used for the parabolic radius.
    pub radius_steps: usize,
    /// Syllable bounds `B` for the moment partial sums.
    pub ladder: Vec<u64>,
    pub admissibility_depth: u32,
}

impl Default for ClassifyBudget {
    fn default() -> Self {
        ClassifyBudget {
            parabolic: ParabolicBudget::default(),
            radius_steps: 400,
            ladder: vec![0, 1, 2, 4, 8, 16],
            admissibility_depth: 2,
        }
    }
}

/// Partial sums of `I_k^(2)` over a ladder of truncations.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentLadder {
    pub b: Vec<u64>,
    pub sums: Vec<f64>,
    pub increments: Vec<f64>,
    pub verdict: MomentsVerdict,
}

impl MomentLadder {
    pub fn new(b: Vec<u64>, sums: Vec<f64>) -> Self {
        let increments: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
        let verdict = match increments.len() {
            0 | 1 => MomentsVerdict::Inconclusive,
            n => {
                let (prev, last) = (increments[n - 2], increments[n - 1]);
                let scale = sums.last().copied().unwrap_or(0.0);
                if last <= 1e-12 * scale {
                    MomentsVerdict::Finite
                } else if prev <= 0.0 {
                    MomentsVerdict::Inconclusive
                } else if last / prev < FINITE_INCREMENT {
                    MomentsVerdict::Finite
                } else if last / prev >= INFINITE_INCREMENT {
                    MomentsVerdict::Infinite
                } else {
                    MomentsVerdict::Inconclusive
                }
            }
        };
        MomentLadder {
            b,
            sums,
            increments,
            verdict,
        }
    }
}

/// `G'(e, e | r)` on `r_i = R_hat (1 - 2^-i)` and the fitted exponent of
/// `G' ~ (1 - r / R_hat)^-slope`.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceFit {
    pub r: Vec<f64>,
    pub derivative: Vec<f64>,
    pub slope: f64,
    pub verdict: Verdict,
}

impl DivergenceFit {
    /// Fits the derivative series (extrapolated with the tail capped at
    /// `r / R_hat`) on `levels` points.
    pub fn from_returns(returns: &[f64], r_hat: f64, levels: usize) -> Self {
        let series = GreenSeries::new(returns.to_vec());
        let mut r = Vec::with_capacity(levels);
        let mut derivative = Vec::with_capacity(levels);
        for i in 1..=levels {
            let ri = r_hat * (1.0 - libm::ldexp(1.0, -(i as i32)));
            r.push(ri);
            derivative.push(series.derivative(ri, 1, Some(ri / r_hat)).extrapolated());
        }
        let xs: Vec<f64> = (1..=levels)
            .map(|i| i as f64 * core::f64::consts::LN_2)
            .collect();
        let ys: Vec<f64> = derivative.iter().map(|&g| libm::log(g)).collect();
        let slope = least_squares_slope(&xs, &ys);
        let verdict = if !slope.is_finite() || slope > DIVERGENT_SLOPE {
            Verdict::Yes
        } else if slope < CONVERGENT_SLOPE {
            Verdict::No
        } else {
            Verdict::Inconclusive
        };
        DivergenceFit {
            r,
            derivative,
            slope,
            verdict,
        }
    }
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorReport {
    pub factor: FactorId,
    pub radius: ParabolicRadius,
    pub degenerate: Verdict,
    pub moments: MomentLadder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub r_hat: f64,
    pub factors: Vec<FactorReport>,
    pub divergence: DivergenceFit,
    pub divergent: Verdict,
    pub positive_recurrent: Verdict,
    pub warnings: Vec<String>,
}

fn degeneracy(point: f64) -> Verdict {
    if point > DEGENERACY_BAND.1 {
        Verdict::No
    } else {
        Verdict::Inconclusive
    }
}

/// `returns` are `q_n` as floats, `r_hat` the estimate of `R_mu`.
pub fn classify<E: Executor>(
    m: &Measure,
    returns: &[f64],
    r_hat: f64,
    budget: &ClassifyBudget,
    exec: &E,
) -> Result<Classification, ParabolicError> {
    let report = validate_with(m, budget.admissibility_depth, exec)?;
    if report.admissible_to_depth < 1 {
        return Err(ParabolicError::Inadmissible(
            "the support does not reach every generator".into(),
        ));
    }
    let model = ParabolicModel::new(m, budget.parabolic, exec)?;
    let mut warnings = Vec::new();
    let mut factors = Vec::new();
    for k in 1..=m.group().n_factors() as FactorId {
        let radius = model.radius(k, r_hat, budget.radius_steps);
        if radius.point < DEGENERACY_BAND.0 {
            warnings.push(format!(
                "R_{k} = {} lies below 1; truncation artifact",
                radius.point
            ));
        }
        let fg = model.factor_green(k, r_hat, 1.0);
        let sums = budget
            .ladder
            .iter()
            .map(|&b| model.green_moment(&fg, b))
            .collect();
        factors.push(FactorReport {
            factor: k,
            degenerate: degeneracy(radius.point),
            radius,
            moments: MomentLadder::new(budget.ladder.clone(), sums),
        });
    }
    let divergence = DivergenceFit::from_returns(returns, r_hat, 5);
    let divergent = divergence.verdict;
    let all_finite = factors
        .iter()
        .all(|f| f.moments.verdict == MomentsVerdict::Finite);
    let any_infinite = factors
        .iter()
        .any(|f| f.moments.verdict == MomentsVerdict::Infinite);
    let positive_recurrent = match divergent {
        Verdict::No => Verdict::No,
        _ if any_infinite => Verdict::No,
        Verdict::Yes if all_finite => Verdict::Yes,
        _ => Verdict::Inconclusive,
    };
    if factors.iter().all(|f| f.degenerate == Verdict::No) {
        if any_infinite {
            warnings.push("all factors non-degenerate but some Green moments look infinite".into());
        }
        if divergent == Verdict::No {
            warnings.push("all factors non-degenerate but the walk looks convergent".into());
        }
    }
    Ok(Classification {
        r_hat,
        factors,
        divergence,
        divergent,
        positive_recurrent,
        warnings,
    })
}
