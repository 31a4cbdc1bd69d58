//! Spatial sums `I^(k)(r)` as polynomials in `r`.
//!
//! Every Green factor is truncated jointly: only monomials of total degree
//! at most `N` are kept. The identities relating `I^(k)` to derivatives of
//! `G` then hold coefficient by coefficient, and the only remaining error
//! is the spatial truncation of the intermediate points.

use alloc::vec;
use alloc::vec::Vec;

use super::series::{falling, operator_terms};
use super::GreenError;
use crate::engine::{ball_size, Executor, MemoryBudget, Sequential, Walk, WordBall, NODE_BYTES};
use crate::measures::{Measure, MeasureError};

/// Region for intermediate points: at most `m` syllables, each of word
/// length at most `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub m: usize,
    pub b: u64,
}

impl Truncation {
    pub fn new(m: usize, b: u64) -> Self {
        Truncation { m, b }
    }
}

/// Coefficients of `I^(0) = G(e, e)` and `I^(1), ..., I^(k_max)` up to
/// degree `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchySums {
    pub n: usize,
    pub truncation: Truncation,
    /// `chains[k][a]`: coefficient of `r^a` in `I^(k)`.
    pub chains: Vec<Vec<f64>>,
}

/// Left and right sides of an identity and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl Residual {
    fn new(lhs: f64, rhs: f64) -> Self {
        Residual {
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
        }
    }
}

/// `f_{j,k}` for `j = 0..=k`, with `F_k = sum_j f_{j,k} r^{k+j-1} G^(j)`.
pub fn fk_coefficients(k: usize) -> Vec<u128> {
    assert!(k >= 1);
    let mut f = vec![1u128, 1];
    for kk in 1..k {
        let mut next = vec![0u128; kk + 2];
        for (j, slot) in next.iter_mut().enumerate() {
            let carry = if j >= 1 { f[j - 1] } else { 0 };
            let own = if j <= kk {
                (kk + j + 1) as u128 * f[j]
            } else {
                0
            };
            *slot = carry + own;
        }
        f = next;
    }
    f
}

fn poly(c: &[f64], r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * r + x)
}

impl CauchySums {
    pub fn k_max(&self) -> usize {
        self.chains.len() - 1
    }

    /// `q_a = mu^{*a}(e)`.
    pub fn returns(&self) -> &[f64] {
        &self.chains[0]
    }

    /// `I^(k)(r)` (`k = 0` gives `G(e, e | r)`).
    pub fn spatial_sum(&self, k: usize, r: f64) -> f64 {
        poly(&self.chains[k], r)
    }

    /// `G^(j)(e, e | r)` of the degree-`n` polynomial.
    pub fn green_derivative(&self, j: usize, r: f64) -> f64 {
        let q = self.returns();
        let mut acc = 0.0;
        for n in (j..q.len()).rev() {
            acc = acc * r + falling(n, j) * q[n];
        }
        acc
    }

    /// `d/dr (r G)` against `sum_g G(e, g) G(g, e)`.
    pub fn lemma_first_derivative(&self, r: f64) -> Residual {
        let lhs: Vec<f64> = self
            .returns()
            .iter()
            .enumerate()
            .map(|(n, q)| (n + 1) as f64 * q)
            .collect();
        Residual::new(poly(&lhs, r), self.spatial_sum(1, r))
    }

    /// `F_k(r)` from the coefficient expansion against `k! r^{k-1} I^(k)(r)`.
    pub fn fk_identity(&self, k: usize, r: f64) -> Residual {
        let f = fk_coefficients(k);
        let lhs: f64 = f
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                c as f64 * libm::pow(r, (k + j - 1) as f64) * self.green_derivative(j, r)
            })
            .sum();
        let kf: f64 = (1..=k).map(|i| i as f64).product();
        Residual::new(
            lhs,
            kf * libm::pow(r, k as f64 - 1.0) * self.spatial_sum(k, r),
        )
    }
}

pub fn cauchy_sums(
    m: &Measure,
    k_max: usize,
    n: usize,
    truncation: Truncation,
) -> Result<CauchySums, GreenError> {
    cauchy_sums_with(m, k_max, n, truncation, MemoryBudget::DEFAULT, &Sequential)
}

/// Computes `I^(k) = (G 1_T G 1_T ... G delta_e)(e)` degree by degree:
/// level `i` satisfies `Y_i[a] = 1_T Y_{i-1}[a] + P Y_i[a-1]`, where `P` is
/// the Markov operator. Degree `a` only lives within word length
/// `min(a, n - a) * d_mu` of `e`.
pub fn cauchy_sums_with<E: Executor>(
    m: &Measure,
    k_max: usize,
    n: usize,
    truncation: Truncation,
    budget: MemoryBudget,
    exec: &E,
) -> Result<CauchySums, GreenError> {
    let spec = m.group();
    let d = m.support_radius();
    let levels = k_max + 1;
    let radius = (n / 2) as u32 * d;
    let need =
        ball_size(spec, radius).saturating_mul((NODE_BYTES + 1 + 8 * (2 * levels + 1)) as u128);
    if !budget.fits(need) {
        return Err(MeasureError::Budget {
            largest_completed: 0,
            partial: None,
        }
        .into());
    }
    let ball = WordBall::new(spec, radius, d);
    let walk = Walk::<f64>::new(&ball, &operator_terms(m));
    let mask: Vec<bool> = (0..ball.len() as u32)
        .map(|v| {
            ball.depth(v) as usize <= truncation.m && ball.max_syllable(v) as u64 <= truncation.b
        })
        .collect();
    let size = ball.len();
    let mut cur: Vec<Vec<f64>> = (0..levels).map(|_| vec![0.0; size]).collect();
    let mut next: Vec<Vec<f64>> = (0..levels).map(|_| vec![0.0; size]).collect();
    let mut chains = vec![vec![0.0; n + 1]; levels];
    for a in 0..=n {
        let rad = (a.min(n - a) as u32) * d;
        for i in 0..levels {
            let (lower, upper) = next.split_at_mut(i);
            let out = &mut upper[0];
            if a == 0 {
                out.iter_mut().for_each(|x| *x = 0.0);
                if i == 0 {
                    out[0] = 1.0;
                }
            } else {
                walk.step(exec, &cur[i], out, rad)
                    .expect("floats do not overflow");
            }
            if i > 0 {
                let prev = &lower[i - 1];
                for ((o, p), keep) in out.iter_mut().zip(prev).zip(&mask) {
                    if *keep {
                        *o += p;
                    }
                }
            }
            chains[i][a] = out[0];
        }
        core::mem::swap(&mut cur, &mut next);
    }
    Ok(CauchySums {
        n,
        truncation,
        chains,
    })
}
