//! Functions on a factor `H_k`, stored on a box (`Z^d`) or on the whole
//! group (`Z/m`), and the convolutions used by parabolic Green functions.

use alloc::vec;
use alloc::vec::Vec;

use super::kernel::ReturnKernel;
use crate::engine::{Executor, Neumaier, OUTSIDE};
use crate::freeprod::FactorKind;

#[derive(Debug, Clone, PartialEq)]
pub struct FactorGrid {
    pub kind: FactorKind,
    /// Half side of the box for `Z^d`; unused for `Z/m`.
    pub radius: i64,
    side: i64,
    dim: usize,
    size: usize,
}

/// Default box half side for rank `d`: at most about 20000 cells, capped at 40.
pub fn default_radius(d: usize) -> i64 {
    let per_axis = libm::pow(20000.0, 1.0 / d as f64);
    (((per_axis - 1.0) / 2.0) as i64).clamp(2, 40)
}

impl FactorGrid {
    pub fn new(kind: FactorKind, radius: Option<i64>) -> Self {
        match kind {
            FactorKind::FreeAbelian { rank } => {
                let radius = radius.unwrap_or_else(|| default_radius(rank as usize));
                let side = 2 * radius + 1;
                FactorGrid {
                    kind,
                    radius,
                    side,
                    dim: rank as usize,
                    size: (side as usize).pow(rank),
                }
            }
            FactorKind::FiniteCyclic { order } => FactorGrid {
                kind,
                radius: 0,
                side: order as i64,
                dim: 1,
                size: order as usize,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn origin(&self) -> usize {
        self.index(&vec![0; self.dim])
            .expect("origin is in the grid")
    }

    pub fn index(&self, c: &[i64]) -> Option<usize> {
        match self.kind {
            FactorKind::FiniteCyclic { order } => Some(c[0].rem_euclid(order as i64) as usize),
            FactorKind::FreeAbelian { .. } => {
                let mut idx = 0i64;
                for &x in c.iter().rev() {
                    if x.abs() > self.radius {
                        return None;
                    }
                    idx = idx * self.side + (x + self.radius);
                }
                Some(idx as usize)
            }
        }
    }

    pub fn coords(&self, mut i: usize) -> Vec<i64> {
        match self.kind {
            FactorKind::FiniteCyclic { .. } => vec![i as i64],
            FactorKind::FreeAbelian { .. } => {
                let mut c = Vec::with_capacity(self.dim);
                for _ in 0..self.dim {
                    c.push((i as i64) % self.side - self.radius);
                    i /= self.side as usize;
                }
                c
            }
        }
    }

    /// Word length of the cell.
    pub fn word_len(&self, i: usize) -> u64 {
        let c = self.coords(i);
        match self.kind {
            FactorKind::FiniteCyclic { order } => {
                let k = c[0] as u64;
                k.min(order as u64 - k)
            }
            FactorKind::FreeAbelian { .. } => c.iter().map(|x| x.unsigned_abs()).sum(),
        }
    }

    /// Coordinates of every cell, flattened.
    pub fn all_coords(&self) -> Vec<i64> {
        (0..self.size).flat_map(|i| self.coords(i)).collect()
    }

    /// Index of `x - y`.
    pub fn diff_index(&self, x: &[i64], y: &[i64]) -> Option<usize> {
        match self.kind {
            FactorKind::FiniteCyclic { order } => {
                Some((x[0] - y[0]).rem_euclid(order as i64) as usize)
            }
            FactorKind::FreeAbelian { .. } => {
                let mut idx = 0i64;
                for (a, b) in x.iter().zip(y).rev() {
                    let v = a - b;
                    if v.abs() > self.radius {
                        return None;
                    }
                    idx = idx * self.side + (v + self.radius);
                }
                Some(idx as usize)
            }
        }
    }

    /// Index of `-x`.
    pub fn negate(&self, i: usize) -> usize {
        let c: Vec<i64> = self.coords(i).iter().map(|x| -x).collect();
        self.index(&c).expect("boxes are symmetric")
    }

    /// `table[i * offsets.len() + j]` = index of `coords(i) + offsets[j]`.
    pub fn shift_table(&self, offsets: &[Vec<i64>]) -> Vec<u32> {
        let mut table = vec![OUTSIDE; self.size * offsets.len()];
        for i in 0..self.size {
            let c = self.coords(i);
            for (j, o) in offsets.iter().enumerate() {
                let s: Vec<i64> = c.iter().zip(o).map(|(a, b)| a + b).collect();
                if let Some(t) = self.index(&s) {
                    table[i * offsets.len() + j] = t as u32;
                }
            }
        }
        table
    }
}

/// Sparse convolution `f * K` restricted to the grid:
/// `(f * K)(x) = sum_j K(j) f(x - j)`.
pub struct SparseConv {
    weights: Vec<f64>,
    table: Vec<u32>,
}

impl SparseConv {
    pub fn new(grid: &FactorGrid, kernel: &ReturnKernel) -> Self {
        let kept: Vec<&(Vec<i64>, f64)> =
            kernel.entries.iter().filter(|(_, w)| *w != 0.0).collect();
        let offsets: Vec<Vec<i64>> = kept
            .iter()
            .map(|(p, _)| p.iter().map(|x| -x).collect())
            .collect();
        SparseConv {
            weights: kept.iter().map(|(_, w)| *w).collect(),
            table: grid.shift_table(&offsets),
        }
    }

    pub fn apply<E: Executor>(&self, exec: &E, f: &[f64], out: &mut [f64]) {
        let k = self.weights.len();
        exec.for_chunks(out, 1 << 12, |start, chunk| {
            for (i, slot) in chunk.iter_mut().enumerate() {
                let row = &self.table[(start + i) * k..(start + i + 1) * k];
                let mut acc = Neumaier::new();
                for (&t, &w) in row.iter().zip(&self.weights) {
                    if t != OUTSIDE {
                        acc.add(w * f[t as usize]);
                    }
                }
                *slot = acc.value();
            }
        });
    }
}

/// `(f * g)(e) = sum_x f(x) g(-x)`.
pub fn at_origin(grid: &FactorGrid, f: &[f64], g: &[f64]) -> f64 {
    let mut acc = Neumaier::new();
    for (i, &fi) in f.iter().enumerate() {
        if fi != 0.0 {
            acc.add(fi * g[grid.negate(i)]);
        }
    }
    acc.value()
}

/// Dense convolution `f * g` restricted to the grid.
pub fn convolve_dense<E: Executor>(exec: &E, grid: &FactorGrid, f: &[f64], g: &[f64]) -> Vec<f64> {
    let coords = grid.all_coords();
    let dim = grid.dim;
    let support: Vec<(usize, f64)> = f
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, &v)| (i, v))
        .collect();
    let mut out = vec![0.0; grid.len()];
    exec.for_chunks(&mut out, 256, |start, chunk| {
        for (i, slot) in chunk.iter_mut().enumerate() {
            let x = &coords[(start + i) * dim..(start + i + 1) * dim];
            let mut acc = Neumaier::new();
            for &(j, fy) in &support {
                if let Some(t) = grid.diff_index(x, &coords[j * dim..(j + 1) * dim]) {
                    acc.add(fy * g[t]);
                }
            }
            *slot = acc.value();
        }
    });
    out
}
