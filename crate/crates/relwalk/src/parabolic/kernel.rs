use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;

use super::ParabolicError;
use crate::engine::{ball_size, Executor, MemoryBudget, Walk, WordBall, NODE_BYTES};
use crate::freeprod::{FactorElement, FactorId, FactorKind, GroupElement, GroupSpec};
use crate::green::series::forward_terms;
use crate::measures::{Measure, MeasureError};

/// Coordinates of an element of `H_k` (the zero vector for `e`).
pub fn factor_coords(spec: &GroupSpec, k: FactorId, g: &GroupElement) -> Option<Vec<i64>> {
    match g.syllables() {
        [] => Some(vec![0; spec.kind(k).dim()]),
        [s] if s.factor == k => Some(s.coords.clone()),
        _ => None,
    }
}

/// The element of `H_k` with the given coordinates.
pub fn factor_element(spec: &GroupSpec, k: FactorId, coords: &[i64]) -> GroupElement {
    spec.normalize(&[FactorElement::new(k, coords.to_vec())])
        .expect("declared factor")
}

/// First-return coefficients to `H_k`: `coeffs[i][t]` is the probability
/// that a walk from `e` is in `H_k` for the first time after time 0 at
/// time `t`, at `points[i]`, without leaving the word ball of radius
/// `exploration`. The kernel at `r` is `sum_t coeffs[i][t] r^t`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCoefficients {
    pub factor: FactorId,
    pub kind: FactorKind,
    pub horizon: usize,
    pub exploration: u32,
    pub points: Vec<Vec<i64>>,
    pub coeffs: Vec<Vec<f64>>,
    /// Mass still outside `H_k` after the horizon.
    pub alive: f64,
    /// True when no path of length `<= horizon` can leave the ball.
    pub exact: bool,
}

/// `p_{k,r}` (or its `r`-derivative) as a function of `h^-1 h'`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnKernel {
    pub factor: FactorId,
    pub kind: FactorKind,
    pub r: f64,
    /// Order of the `r`-derivative (0 for the kernel itself).
    pub derivative: usize,
    pub horizon: usize,
    pub exploration: u32,
    pub entries: Vec<(Vec<i64>, f64)>,
    index: HashMap<Vec<i64>, usize>,
}

impl ReturnKernel {
    /// `p(e, h)`.
    pub fn weight(&self, h: &[i64]) -> f64 {
        self.index.get(h).map_or(0.0, |&i| self.entries[i].1)
    }

    /// `p(h, h') = p(e, h^-1 h')`.
    pub fn entry(&self, h: &[i64], h2: &[i64]) -> f64 {
        let diff: Vec<i64> = match self.kind {
            FactorKind::FreeAbelian { .. } => h2.iter().zip(h).map(|(a, b)| a - b).collect(),
            FactorKind::FiniteCyclic { order } => vec![(h2[0] - h[0]).rem_euclid(order as i64)],
        };
        self.weight(&diff)
    }

    pub fn total_mass(&self) -> f64 {
        crate::engine::neumaier_sum(&self.entries.iter().map(|(_, w)| *w).collect::<Vec<_>>())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, w)| *w == 0.0)
    }
}

impl KernelCoefficients {
    /// `d^j/dr^j p_{k,r}`.
    pub fn evaluate(&self, r: f64, derivative: usize) -> ReturnKernel {
        let entries: Vec<(Vec<i64>, f64)> = self
            .points
            .iter()
            .zip(&self.coeffs)
            .map(|(p, c)| {
                let mut acc = crate::engine::Neumaier::new();
                for (t, &ct) in c.iter().enumerate().skip(derivative.max(1)) {
                    if ct != 0.0 {
                        acc.add(
                            crate::green::series::falling(t, derivative)
                                * ct
                                * libm::pow(r, (t - derivative) as f64),
                        );
                    }
                }
                (p.clone(), acc.value())
            })
            .collect();
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (p, _))| (p.clone(), i))
            .collect();
        ReturnKernel {
            factor: self.factor,
            kind: self.kind,
            r,
            derivative,
            horizon: self.horizon,
            exploration: self.exploration,
            entries,
            index,
        }
    }

    pub fn at(&self, r: f64) -> ReturnKernel {
        self.evaluate(r, 0)
    }
}

/// Dynamic programming over path length: the walk from `e` runs in the
/// word ball of radius `exploration` and is absorbed on `H_k`.
pub fn kernel_coefficients<E: Executor>(
    m: &Measure,
    k: FactorId,
    horizon: usize,
    exploration: u32,
    budget: MemoryBudget,
    exec: &E,
) -> Result<KernelCoefficients, ParabolicError> {
    let spec = m.group();
    spec.factor(k).map_err(MeasureError::from)?;
    let d = m.support_radius();
    let radius = exploration.max(d);
    if !budget.fits(ball_size(spec, radius).saturating_mul((NODE_BYTES + 16) as u128)) {
        return Err(MeasureError::Budget {
            largest_completed: 0,
            partial: None,
        }
        .into());
    }
    let ball = WordBall::new(spec, radius, d);
    let mut absorbing: Vec<(u32, Vec<i64>)> = Vec::new();
    for v in 0..ball.len() as u32 {
        if ball.depth(v) > 1 {
            continue;
        }
        if let Some(c) = factor_coords(spec, k, &ball.element(v)) {
            absorbing.push((v, c));
        }
    }
    absorbing.sort_by(|a, b| a.1.cmp(&b.1));
    let walk = Walk::<f64>::new(&ball, &forward_terms(m));
    let mut cur = vec![0.0; ball.len()];
    cur[0] = 1.0;
    let mut next = vec![0.0; ball.len()];
    let mut coeffs = vec![vec![0.0; horizon + 1]; absorbing.len()];
    for t in 1..=horizon {
        walk.step(exec, &cur, &mut next, radius)
            .expect("floats do not overflow");
        core::mem::swap(&mut cur, &mut next);
        for (row, (v, _)) in coeffs.iter_mut().zip(&absorbing) {
            row[t] = cur[*v as usize];
            cur[*v as usize] = 0.0;
        }
    }
    let alive = cur.iter().sum();
    let exact = exploration as u64 >= horizon as u64 * d as u64;
    let (points, coeffs) = absorbing
        .into_iter()
        .zip(coeffs)
        .filter(|(_, c)| c.iter().any(|&x| x != 0.0))
        .map(|((_, p), c)| (p, c))
        .unzip();
    Ok(KernelCoefficients {
        factor: k,
        kind: spec.kind(k),
        horizon,
        exploration,
        points,
        coeffs,
        alive,
        exact,
    })
}
