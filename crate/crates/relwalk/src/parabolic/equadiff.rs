use alloc::vec::Vec;

use super::model::ParabolicModel;
use crate::engine::Executor;
use crate::freeprod::FactorId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquadiffRow {
    pub r: f64,
    pub g1: f64,
    pub g2: f64,
    /// `G'' / G'^3`.
    pub lhs: f64,
    /// `1 + sum_k G''_{k,r}`.
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquadiffTable {
    pub rows: Vec<EquadiffRow>,
}

impl EquadiffTable {
    /// Smallest `C` with every ratio in `[1/C, C]`.
    pub fn band(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| row.ratio.max(1.0 / row.ratio))
            .fold(1.0, f64::max)
    }
}

/// Both sides of the rough differential equation on a grid of `r`.
pub fn equadiff_ratio<E: Executor>(model: &ParabolicModel<'_, E>, grid: &[f64]) -> EquadiffTable {
    let n = model.measure().group().n_factors() as FactorId;
    let rows = grid
        .iter()
        .map(|&r| {
            let d = model.derivatives(1, r);
            let mut rhs = 1.0;
            for k in 1..=n {
                rhs += if k == 1 {
                    d.parabolic2
                } else {
                    model.derivatives(k, r).parabolic2
                };
            }
            let lhs = d.g2 / (d.g1 * d.g1 * d.g1);
            EquadiffRow {
                r,
                g1: d.g1,
                g2: d.g2,
                lhs,
                rhs,
                ratio: lhs / rhs,
            }
        })
        .collect();
    EquadiffTable { rows }
}
