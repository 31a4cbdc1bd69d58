use alloc::vec;
use alloc::vec::Vec;

use super::grid::{at_origin, convolve_dense, FactorGrid, SparseConv};
use super::kernel::{kernel_coefficients, KernelCoefficients, ReturnKernel};
use super::{ParabolicBudget, ParabolicError};
use crate::engine::{Executor, Neumaier};
use crate::freeprod::{FactorId, GroupElement, GroupSpec};
use crate::green::radius::richardson;
use crate::green::{GreenFunction, GreenSeries, SeriesValue, SphereSumTable};
use crate::measures::Measure;

/// `sum_n t^n p^(n)(e, .)` on a factor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorGreen {
    pub grid: FactorGrid,
    pub t: f64,
    pub values: Vec<f64>,
    /// `p^(n)(e, e)` for `n = 0..=steps`.
    pub returns: Vec<f64>,
    pub steps: usize,
    /// `t^n` times the mass left in the last power.
    pub remaining: f64,
}

impl FactorGreen {
    /// Iterates the kernel until `t^n n^2` times the remaining mass falls
    /// below `tol` times the value at `e`, with at least `min_steps` and
    /// at most `max_steps` powers.
    pub fn compute<E: Executor>(
        exec: &E,
        grid: &FactorGrid,
        kernel: &ReturnKernel,
        t: f64,
        min_steps: usize,
        max_steps: usize,
        tol: f64,
    ) -> Self {
        let conv = SparseConv::new(grid, kernel);
        let origin = grid.origin();
        let mut cur = vec![0.0; grid.len()];
        cur[origin] = 1.0;
        let mut values = cur.clone();
        let mut next = vec![0.0; grid.len()];
        let mut returns = vec![1.0];
        let mut tn = 1.0;
        let mut remaining = 1.0;
        let mut steps = 0;
        if kernel.is_zero() {
            return FactorGreen {
                grid: grid.clone(),
                t,
                values,
                returns,
                steps,
                remaining: 0.0,
            };
        }
        while steps < max_steps {
            conv.apply(exec, &cur, &mut next);
            core::mem::swap(&mut cur, &mut next);
            steps += 1;
            tn *= t;
            let mut mass = Neumaier::new();
            for (acc, &v) in values.iter_mut().zip(&cur) {
                *acc += tn * v;
                mass.add(v);
            }
            returns.push(cur[origin]);
            remaining = tn * mass.value();
            let weight = (steps * steps) as f64;
            if steps >= min_steps
                && (remaining * weight <= tol * values[origin] || remaining == 0.0)
            {
                break;
            }
        }
        FactorGreen {
            grid: grid.clone(),
            t,
            values,
            returns,
            steps,
            remaining,
        }
    }

    pub fn at_identity(&self) -> f64 {
        self.values[self.grid.origin()]
    }

    pub fn get(&self, coords: &[i64]) -> Option<f64> {
        self.grid.index(coords).map(|i| self.values[i])
    }

    /// The return series `sum_n p^(n)(e, e) t^n` as a power series in `t`.
    pub fn series(&self) -> GreenSeries {
        GreenSeries::new(self.returns.clone())
    }
}

/// `G`, `G'`, `G''` in `r` at `e`, and the parabolic `t`-derivatives at
/// `t = 1`, all read off one factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelDerivatives {
    pub factor: FactorId,
    pub r: f64,
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
    /// `G_{k,r}^(1)` and `G_{k,r}^(2)`: `t`-derivatives at `t = 1`.
    pub parabolic1: f64,
    pub parabolic2: f64,
}

/// Estimate of the radius of convergence of `t -> G_{k,r}(e, e | t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicRadius {
    pub factor: FactorId,
    pub r: f64,
    /// Infinite when the kernel vanishes.
    pub point: f64,
    /// `1 / sum_h p(e, h)`; equals the radius for symmetric kernels.
    pub mass_bound: f64,
    /// `p^(2n+2)(e,e) / p^(2n)(e,e)`.
    pub ratios: Vec<f64>,
    pub extrapolations: Vec<f64>,
}

/// First-return coefficients for every factor, shared by all evaluations.
pub struct ParabolicModel<'a, E: Executor> {
    measure: &'a Measure,
    budget: ParabolicBudget,
    exec: &'a E,
    coeffs: Vec<KernelCoefficients>,
}

impl<'a, E: Executor> ParabolicModel<'a, E> {
    pub fn new(
        measure: &'a Measure,
        budget: ParabolicBudget,
        exec: &'a E,
    ) -> Result<Self, ParabolicError> {
        let n = measure.group().n_factors();
        let mut coeffs = Vec::with_capacity(n);
        for k in 1..=n as FactorId {
            coeffs.push(kernel_coefficients(
                measure,
                k,
                budget.horizon,
                budget.exploration,
                budget.memory,
                exec,
            )?);
        }
        Ok(ParabolicModel {
            measure,
            budget,
            exec,
            coeffs,
        })
    }

    pub fn measure(&self) -> &Measure {
        self.measure
    }

    pub fn budget(&self) -> ParabolicBudget {
        self.budget
    }

    pub fn coefficients(&self, k: FactorId) -> &KernelCoefficients {
        &self.coeffs[k as usize - 1]
    }

    pub fn kernel(&self, k: FactorId, r: f64) -> ReturnKernel {
        self.coefficients(k).at(r)
    }

    pub fn grid(&self, k: FactorId) -> FactorGrid {
        let kind = self.measure.group().kind(k);
        FactorGrid::new(kind, Some(self.budget.resolved_box(kind.dim())))
    }

    pub fn factor_green(&self, k: FactorId, r: f64, t: f64) -> FactorGreen {
        let b = &self.budget;
        FactorGreen::compute(
            self.exec,
            &self.grid(k),
            &self.kernel(k, r),
            t,
            0,
            b.max_steps,
            b.tol,
        )
    }

    /// `G_{k,r}(e, e | t)` summed to `n` powers.
    pub fn parabolic_green(&self, k: FactorId, r: f64, t: f64, n: usize) -> SeriesValue {
        let fg = FactorGreen::compute(self.exec, &self.grid(k), &self.kernel(k, r), 1.0, n, n, 0.0);
        fg.series().value(t, None)
    }

    pub fn derivatives(&self, k: FactorId, r: f64) -> KernelDerivatives {
        let grid = self.grid(k);
        let fg = self.factor_green(k, r, 1.0);
        let c = self.coefficients(k);
        let k1 = c.evaluate(r, 1);
        let k2 = c.evaluate(r, 2);
        let g = &fg.values;
        let mut h1 = vec![0.0; grid.len()];
        SparseConv::new(&grid, &k1).apply(self.exec, g, &mut h1);
        let mut gk2 = vec![0.0; grid.len()];
        SparseConv::new(&grid, &k2).apply(self.exec, g, &mut gk2);
        let g1 = at_origin(&grid, &h1, g);
        let h2 = convolve_dense(self.exec, &grid, &h1, g);
        let g2 = 2.0 * at_origin(&grid, &h2, &h1) + at_origin(&grid, &gk2, g);
        let s = fg.series();
        KernelDerivatives {
            factor: k,
            r,
            g: fg.at_identity(),
            g1,
            g2,
            parabolic1: s.derivative(1.0, 1, None).value,
            parabolic2: s.derivative(1.0, 2, None).value,
        }
    }

    /// Ratio extrapolation of `p^(2n)(e, e)` over `n_max` powers.
    pub fn radius(&self, k: FactorId, r: f64, n_max: usize) -> ParabolicRadius {
        let kernel = self.kernel(k, r);
        let mass = kernel.total_mass();
        if kernel.is_zero() {
            return ParabolicRadius {
                factor: k,
                r,
                point: f64::INFINITY,
                mass_bound: f64::INFINITY,
                ratios: Vec::new(),
                extrapolations: Vec::new(),
            };
        }
        let fg = FactorGreen::compute(self.exec, &self.grid(k), &kernel, 1.0, n_max, n_max, 0.0);
        let q = &fg.returns;
        let ratios: Vec<f64> = (1..n_max / 2)
            .take_while(|&n| q[2 * n] > 0.0 && q[2 * n + 2] > 0.0)
            .map(|n| q[2 * n + 2] / q[2 * n])
            .collect();
        let mut extrapolations = Vec::new();
        for order in 0..=crate::green::radius::RICHARDSON_ORDER.min(ratios.len().saturating_sub(1))
        {
            extrapolations.push(libm::sqrt(richardson(&ratios, 1, order).max(0.0)));
        }
        let point = match extrapolations.last() {
            Some(&inv) if inv > 0.0 => 1.0 / inv,
            _ => 1.0 / mass,
        };
        ParabolicRadius {
            factor: k,
            r,
            point,
            mass_bound: 1.0 / mass,
            ratios,
            extrapolations,
        }
    }

    /// Green function through the factors; only for adapted measures.
    pub fn factorized(&self, r: f64) -> Option<FactorizedGreen> {
        if !self.measure.is_adapted() {
            return None;
        }
        let n = self.measure.group().n_factors() as FactorId;
        let factors: Vec<FactorGreen> = (1..=n).map(|k| self.factor_green(k, r, 1.0)).collect();
        Some(FactorizedGreen::new(
            self.measure.group().clone(),
            r,
            factors,
        ))
    }

    /// `sum_{h, h' in H_k, |h|, |h'| <= b} G(e,h) G(h,h') G(h',e)`.
    pub fn green_moment(&self, fg: &FactorGreen, b: u64) -> f64 {
        let grid = &fg.grid;
        let pts: Vec<usize> = (0..grid.len()).filter(|&i| grid.word_len(i) <= b).collect();
        let coords = grid.all_coords();
        let dim = coords.len() / grid.len().max(1);
        let mut acc = Neumaier::new();
        for &h in &pts {
            let gh = fg.values[h];
            if gh == 0.0 {
                continue;
            }
            let hc = &coords[h * dim..(h + 1) * dim];
            for &h2 in &pts {
                let h2c = &coords[h2 * dim..(h2 + 1) * dim];
                if let Some(d) = grid.diff_index(h2c, hc) {
                    acc.add(gh * fg.values[d] * fg.values[grid.negate(h2)]);
                }
            }
        }
        acc.value()
    }
}

/// `G(e, g | r) = G(e, e | r) prod_i F(sigma_i)` over the syllables of `g`,
/// with `F(sigma) = G_j(e, sigma) / G_j(e, e)` from the factor Green
/// functions. Valid for adapted measures.
#[derive(Debug, Clone)]
pub struct FactorizedGreen {
    spec: GroupSpec,
    r: f64,
    factors: Vec<FactorGreen>,
}

impl FactorizedGreen {
    pub fn new(spec: GroupSpec, r: f64, factors: Vec<FactorGreen>) -> Self {
        FactorizedGreen { spec, r, factors }
    }

    pub fn factor(&self, k: FactorId) -> &FactorGreen {
        &self.factors[k as usize - 1]
    }

    /// Largest relative disagreement between the factors on `G(e, e)`.
    pub fn consistency(&self) -> f64 {
        let g0 = self.factors[0].at_identity();
        self.factors
            .iter()
            .map(|f| (f.at_identity() - g0).abs() / g0)
            .fold(0.0, f64::max)
    }

    /// `F(sigma)` for a syllable in factor `k`.
    pub fn f_syllable(&self, k: FactorId, coords: &[i64]) -> Option<f64> {
        let fg = self.factor(k);
        fg.get(coords).map(|v| v / fg.at_identity())
    }

    /// `W_j = sum_{0 < |sigma| <= b} F(sigma) F(sigma^-1)` per factor, and
    /// whether the grid covered the whole range.
    pub fn syllable_weights(&self, b: u64) -> (Vec<f64>, bool) {
        let mut complete = true;
        let w = self
            .factors
            .iter()
            .map(|fg| {
                let grid = &fg.grid;
                if let crate::freeprod::FactorKind::FreeAbelian { .. } = grid.kind {
                    if b > grid.radius as u64 {
                        complete = false;
                    }
                }
                let e = fg.at_identity();
                let mut acc = Neumaier::new();
                for i in 0..grid.len() {
                    let l = grid.word_len(i);
                    if l >= 1 && l <= b {
                        acc.add(fg.values[i] * fg.values[grid.negate(i)] / (e * e));
                    }
                }
                acc.value()
            })
            .collect();
        (w, complete)
    }

    /// `u_m = sum_{|g|_rel = m, syllables <= b} G(e, g) G(g, e)` for
    /// `m = 0..=max_m`.
    pub fn sphere_sums(&self, max_m: usize, b: u64) -> SphereSumTable {
        let (w, _) = self.syllable_weights(b);
        let g = self.factors[0].at_identity();
        let mut out = vec![g * g];
        let mut s = w.clone();
        for m in 1..=max_m {
            out.push(g * g * s.iter().sum::<f64>());
            if m < max_m {
                let total: f64 = s.iter().sum();
                s = w.iter().zip(&s).map(|(wj, sj)| wj * (total - sj)).collect();
            }
        }
        SphereSumTable {
            r: self.r,
            b,
            u: out,
        }
    }
}

impl GreenFunction for FactorizedGreen {
    fn group(&self) -> &GroupSpec {
        &self.spec
    }

    fn r(&self) -> f64 {
        self.r
    }

    fn from_identity(&self, g: &GroupElement) -> Option<f64> {
        let mut v = self.factors[0].at_identity();
        for s in g.syllables() {
            v *= self.f_syllable(s.factor, &s.coords)?;
        }
        Some(v)
    }
}
