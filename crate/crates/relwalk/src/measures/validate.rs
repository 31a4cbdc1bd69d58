use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;

use super::powers::run_walk;
use super::{Measure, MeasureError, Weights};
use crate::engine::{Executor, Sequential, WordBall};
use crate::freeprod::GroupElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aperiodicity {
    Aperiodic,
    /// gcd of the observed return times.
    Periodic {
        period: u64,
    },
    /// No return observed up to twice this depth.
    Unknown {
        depth: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkReport {
    pub symmetric: bool,
    pub aperiodicity: Aperiodicity,
    pub admissible_to_depth: u32,
    pub support_radius: u32,
}

impl WalkReport {
    pub fn is_aperiodic(&self) -> Option<bool> {
        match self.aperiodicity {
            Aperiodicity::Aperiodic => Some(true),
            Aperiodicity::Periodic { .. } => Some(false),
            Aperiodicity::Unknown { .. } => None,
        }
    }

    pub fn period(&self) -> u64 {
        match self.aperiodicity {
            Aperiodicity::Periodic { period } => period,
            _ => 1,
        }
    }
}

pub fn validate(m: &Measure, depth: u32) -> Result<WalkReport, MeasureError> {
    validate_with(m, depth, &Sequential)
}

/// Symmetry, period and admissibility radius of a measure.
///
/// The period is the gcd of the return times up to `2 * depth`. Admissibility
/// is certified on the word ball of radius `depth` by a breadth-first
/// semigroup closure whose intermediate products stay within
/// `depth + 2 * d_mu`.
pub fn validate_with<E: Executor>(
    m: &Measure,
    depth: u32,
    exec: &E,
) -> Result<WalkReport, MeasureError> {
    check_weights(m)?;
    let d = m.support_radius();
    let spec = m.group();
    let inv_terms: Vec<((), GroupElement)> =
        m.support().iter().map(|g| ((), spec.inv(g))).collect();

    let n = 2 * depth as usize;
    let ball = WordBall::new(spec, depth * d, d);
    let mut gcd = 0u64;
    run_walk(
        exec,
        &ball,
        &inv_terms,
        true,
        n,
        |t| (t.min(n - t) as u32) * d,
        |t, s| {
            if t > 0 && s[0] {
                gcd = gcd.gcd(&(t as u64));
            }
        },
    )
    .expect("booleans do not overflow");
    let aperiodicity = match gcd {
        0 => Aperiodicity::Unknown { depth },
        1 => Aperiodicity::Aperiodic,
        p => Aperiodicity::Periodic { period: p },
    };

    let outer = depth + 2 * d;
    let ball = WordBall::new(spec, outer, d);
    let walk = crate::engine::Walk::<bool>::new(&ball, &inv_terms);
    let mut reached = vec![false; ball.len()];
    reached[0] = true;
    let mut next = vec![false; ball.len()];
    loop {
        walk.step(exec, &reached, &mut next, outer)
            .expect("booleans do not overflow");
        let mut grew = false;
        for (r, x) in reached.iter_mut().zip(&next) {
            if *x && !*r {
                *r = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let mut admissible = depth;
    for (v, &r) in reached.iter().enumerate() {
        let l = ball.word_len(v as u32);
        if !r && l >= 1 && l <= admissible {
            admissible = l - 1;
        }
    }

    Ok(WalkReport {
        symmetric: m.is_symmetric(),
        aperiodicity,
        admissible_to_depth: admissible,
        support_radius: d,
    })
}

fn check_weights(m: &Measure) -> Result<(), MeasureError> {
    match m.weights() {
        Weights::Exact(w) => {
            use num_traits::{One, Signed};
            if let Some(i) = w.iter().position(|q| !q.is_positive()) {
                return Err(MeasureError::NonPositive(alloc::format!(
                    "{}",
                    m.support()[i]
                )));
            }
            let total: num_rational::BigRational = w.iter().cloned().sum();
            if !total.is_one() {
                return Err(MeasureError::NotNormalized(alloc::format!("{total}")));
            }
        }
        Weights::Float(w) => {
            if let Some(i) = w.iter().position(|&q| !(q > 0.0)) {
                return Err(MeasureError::NonPositive(alloc::format!(
                    "{}",
                    m.support()[i]
                )));
            }
            let total = crate::engine::neumaier_sum(w);
            if (total - 1.0).abs() > 1e-12 {
                return Err(MeasureError::NotNormalized(alloc::format!("{total}")));
            }
        }
    }
    Ok(())
}
