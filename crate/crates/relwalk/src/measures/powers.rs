use alloc::vec;
use alloc::vec::Vec;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{rational_to_f64, Measure, MeasureError, Mode, Weights};
use crate::engine::{
    ball_size, Executor, MemoryBudget, Sequential, Walk, WalkValue, WordBall, NODE_BYTES,
};
use crate::freeprod::{GroupElement, GroupSpec};

/// `q_n = mu^{*n}(e)` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSequence {
    pub mode: Mode,
    /// Exact values in exact mode.
    pub exact: Option<Vec<BigRational>>,
    /// Float values (converted from the exact ones in exact mode).
    pub values: Vec<f64>,
}

impl ReturnSequence {
    pub fn n_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

/// Runs `steps` pull steps from `delta_e`, zeroing entries beyond `radius(t)`
/// after step `t`, and calls `observe(t, state)` for `t = 0..=steps`.
pub(crate) fn run_walk<V, E, R, O>(
    exec: &E,
    ball: &WordBall,
    terms: &[(V::Weight, GroupElement)],
    one: V,
    steps: usize,
    radius: R,
    mut observe: O,
) -> Result<Vec<V>, crate::engine::walk::Overflow>
where
    V: WalkValue,
    E: Executor,
    R: Fn(usize) -> u32,
    O: FnMut(usize, &[V]),
{
    let walk = Walk::<V>::new(ball, terms);
    let mut old = vec![V::zero(); ball.len()];
    old[0] = one;
    observe(0, &old);
    let mut new = vec![V::zero(); ball.len()];
    for t in 1..=steps {
        walk.step(exec, &old, &mut new, radius(t))?;
        core::mem::swap(&mut old, &mut new);
        observe(t, &old);
    }
    Ok(old)
}

fn inverse_terms<W: Clone>(
    group: &GroupSpec,
    support: &[GroupElement],
    w: &[W],
) -> Vec<(W, GroupElement)> {
    support
        .iter()
        .zip(w)
        .map(|(g, w)| (w.clone(), group.inv(g)))
        .collect()
}

fn table_bytes<V: WalkValue>(spec: &GroupSpec, radius: u32) -> u128 {
    ball_size(spec, radius).saturating_mul((NODE_BYTES + 2 * V::approx_bytes()) as u128)
}

fn u128_fits(d: &BigUint, n: usize) -> bool {
    (d.bits() as usize).saturating_mul(n) < 127
}

pub fn return_sequence(m: &Measure, n_max: usize) -> Result<ReturnSequence, MeasureError> {
    return_sequence_with(m, n_max, MemoryBudget::DEFAULT, &Sequential)
}

/// Return probabilities up to `n_max`. States farther than
/// `min(t, n_max - t) * d_mu` from `e` at step `t` cannot come back in time
/// and are dropped.
pub fn return_sequence_with<E: Executor>(
    m: &Measure,
    n_max: usize,
    budget: MemoryBudget,
    exec: &E,
) -> Result<ReturnSequence, MeasureError> {
    let d = m.support_radius();
    let spec = m.group();
    let bytes = |n: usize| match m.mode() {
        Mode::Float => table_bytes::<f64>(spec, (n / 2) as u32 * d),
        Mode::Exact => table_bytes::<u128>(spec, (n / 2) as u32 * d),
    };
    let mut reach = n_max;
    while reach > 0 && !budget.fits(bytes(reach)) {
        reach -= 1;
    }
    let seq = compute_returns(m, reach, exec);
    if reach < n_max {
        return Err(MeasureError::Budget {
            largest_completed: reach,
            partial: Some(seq),
        });
    }
    Ok(seq)
}

fn compute_returns<E: Executor>(m: &Measure, n: usize, exec: &E) -> ReturnSequence {
    let d = m.support_radius();
    let spec = m.group();
    let ball = WordBall::new(spec, (n / 2) as u32 * d, d);
    let radius = |t: usize| (t.min(n - t) as u32) * d;
    match m.weights() {
        Weights::Float(w) => {
            let terms = inverse_terms(spec, m.support(), w);
            let mut values = vec![0.0; n + 1];
            run_walk(exec, &ball, &terms, 1.0f64, n, radius, |t, s| {
                values[t] = s[0]
            })
            .expect("floats do not overflow");
            ReturnSequence {
                mode: Mode::Float,
                exact: None,
                values,
            }
        }
        Weights::Exact(_) => {
            let (den, ints) = m.integer_weights().expect("exact weights");
            let mut counts: Vec<BigUint> = vec![BigUint::default(); n + 1];
            let mut done = false;
            if u128_fits(&den, n) {
                let w: Vec<u128> = ints
                    .iter()
                    .map(|x| x.to_u128().expect("small weight"))
                    .collect();
                let terms = inverse_terms(spec, m.support(), &w);
                done = run_walk(exec, &ball, &terms, 1u128, n, radius, |t, s| {
                    counts[t] = BigUint::from(s[0])
                })
                .is_ok();
            }
            if !done {
                let terms = inverse_terms(spec, m.support(), &ints);
                run_walk(exec, &ball, &terms, BigUint::one(), n, radius, |t, s| {
                    counts[t] = s[0].clone()
                })
                .expect("big integers do not overflow");
            }
            let exact: Vec<BigRational> = counts
                .into_iter()
                .enumerate()
                .map(|(t, c)| BigRational::new(BigInt::from(c), BigInt::from(den.pow(t as u32))))
                .collect();
            let values = exact.iter().map(rational_to_f64).collect();
            ReturnSequence {
                mode: Mode::Exact,
                exact: Some(exact),
                values,
            }
        }
    }
}

pub fn distribution(
    m: &Measure,
    n: usize,
    prune_radius: Option<u32>,
) -> Result<Measure, MeasureError> {
    distribution_with(m, n, prune_radius, MemoryBudget::DEFAULT, &Sequential)
}

/// `mu^{*n}` restricted to the word ball of `prune_radius` (the whole
/// support when `None`). Values inside the ball are exact.
pub fn distribution_with<E: Executor>(
    m: &Measure,
    n: usize,
    prune_radius: Option<u32>,
    budget: MemoryBudget,
    exec: &E,
) -> Result<Measure, MeasureError> {
    let d = m.support_radius();
    let spec = m.group();
    let full = n as u32 * d;
    let p = prune_radius.unwrap_or(full).min(full);
    let radius = move |t: usize| (t as u32 * d).min(p + (n - t) as u32 * d);
    let w_max = (0..=n).map(radius).max().unwrap_or(0);
    let need = match m.mode() {
        Mode::Float => table_bytes::<f64>(spec, w_max),
        Mode::Exact => table_bytes::<u128>(spec, w_max),
    };
    if !budget.fits(need) {
        return Err(MeasureError::Budget {
            largest_completed: 0,
            partial: None,
        });
    }
    let ball = WordBall::new(spec, w_max, d);
    let collect = |keep: &dyn Fn(usize) -> bool| {
        let mut nodes: Vec<(GroupElement, usize)> = (0..ball.len())
            .filter(|&v| keep(v))
            .map(|v| (ball.element(v as u32), v))
            .collect();
        nodes.sort();
        nodes
    };
    match m.weights() {
        Weights::Float(w) => {
            let terms = inverse_terms(spec, m.support(), w);
            let last = run_walk(exec, &ball, &terms, 1.0f64, n, radius, |_, _| {})
                .expect("floats do not overflow");
            let nodes = collect(&|v| last[v] != 0.0);
            let weights = nodes.iter().map(|(_, v)| last[*v]).collect();
            Ok(Measure::from_parts(
                spec.clone(),
                nodes.into_iter().map(|(g, _)| g).collect(),
                Weights::Float(weights),
            ))
        }
        Weights::Exact(_) => {
            let (den, ints) = m.integer_weights().expect("exact weights");
            let mut last: Option<Vec<BigUint>> = None;
            if u128_fits(&den, n) {
                let w: Vec<u128> = ints
                    .iter()
                    .map(|x| x.to_u128().expect("small weight"))
                    .collect();
                let terms = inverse_terms(spec, m.support(), &w);
                if let Ok(v) = run_walk(exec, &ball, &terms, 1u128, n, radius, |_, _| {}) {
                    last = Some(v.into_iter().map(BigUint::from).collect());
                }
            }
            let last = match last {
                Some(v) => v,
                None => {
                    let terms = inverse_terms(spec, m.support(), &ints);
                    run_walk(exec, &ball, &terms, BigUint::one(), n, radius, |_, _| {})
                        .expect("big integers do not overflow")
                }
            };
            let nodes = collect(&|v| last[v] != BigUint::default());
            let dn = BigInt::from(den.pow(n as u32));
            let weights = nodes
                .iter()
                .map(|(_, v)| BigRational::new(BigInt::from(last[*v].clone()), dn.clone()))
                .collect();
            Ok(Measure::from_parts(
                spec.clone(),
                nodes.into_iter().map(|(g, _)| g).collect(),
                Weights::Exact(weights),
            ))
        }
    }
}
