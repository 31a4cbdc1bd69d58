use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::series::forward_terms;
use super::GreenError;
use crate::engine::{ball_size, Executor, MemoryBudget, Walk, WordBall, NODE_BYTES};
use crate::freeprod::{GroupElement, GroupSpec};
use crate::measures::{Measure, MeasureError};

/// `G(., . | r)` at a fixed `r`, known on some region of the group.
pub trait GreenFunction {
    fn group(&self) -> &GroupSpec;
    fn r(&self) -> f64;
    /// `G(e, g | r)`, or `None` when `g` lies outside the computed region.
    fn from_identity(&self, g: &GroupElement) -> Option<f64>;

    /// `G(x, y | r) = G(e, x^-1 y | r)`.
    fn green(&self, x: &GroupElement, y: &GroupElement) -> Option<f64> {
        let spec = self.group();
        self.from_identity(&spec.mul(&spec.inv(x), y))
    }

    fn at_identity(&self) -> f64 {
        self.from_identity(&GroupElement::identity())
            .expect("identity is always computed")
    }
}

/// `F(x, y | r) = G(x, y | r) / G(e, e | r)`.
pub fn f_ratio<G: GreenFunction + ?Sized>(
    g: &G,
    x: &GroupElement,
    y: &GroupElement,
) -> Result<f64, GreenError> {
    let v = g
        .green(x, y)
        .ok_or_else(|| GreenError::Outside(format!("{x} -> {y}")))?;
    if v <= 0.0 {
        return Err(GreenError::Unreachable(format!("{x} -> {y}")));
    }
    Ok(v / g.at_identity())
}

/// `(d_G, d~_G)`: the Green metric `-log F(x, y)` and its symmetrization
/// `-log F(x, y) - log F(y, x)`.
pub fn green_metrics<G: GreenFunction + ?Sized>(
    g: &G,
    x: &GroupElement,
    y: &GroupElement,
) -> Result<(f64, f64), GreenError> {
    let d = -libm::log(f_ratio(g, x, y)?);
    let back = -libm::log(f_ratio(g, y, x)?);
    Ok((d, d + back))
}

/// `G(e, . | r)` stored on a word ball.
#[derive(Debug, Clone)]
pub struct GreenField {
    ball: WordBall,
    values: Vec<f64>,
    r: f64,
    /// Elements up to this word length are valid.
    valid: u32,
    /// Walk steps summed.
    pub steps: usize,
    /// `r^t` times the mass still alive after the last step.
    pub remaining: f64,
}

impl GreenField {
    /// Partial sums `sum_{t <= n} r^t mu^{*t}(g)` for `|g| <= valid`.
    pub fn series<E: Executor>(
        m: &Measure,
        r: f64,
        n: usize,
        valid: u32,
        budget: MemoryBudget,
        exec: &E,
    ) -> Result<Self, GreenError> {
        let d = m.support_radius();
        let radius = move |t: usize| (t as u32 * d).min(valid + (n - t) as u32 * d);
        let w = (0..=n).map(radius).max().unwrap_or(0).max(valid);
        let ball = make_ball(m, w, 3, budget)?;
        let walk = Walk::<f64>::new(&ball, &forward_terms(m));
        let mut cur = vec![0.0; ball.len()];
        cur[0] = 1.0;
        let mut values = cur.clone();
        let mut next = vec![0.0; ball.len()];
        let mut rt = 1.0;
        for t in 1..=n {
            walk.step(exec, &cur, &mut next, radius(t))
                .expect("floats do not overflow");
            core::mem::swap(&mut cur, &mut next);
            rt *= r;
            for (acc, v) in values.iter_mut().zip(&cur) {
                *acc += rt * v;
            }
        }
        let remaining = rt * cur.iter().sum::<f64>();
        Ok(GreenField {
            ball,
            values,
            r,
            valid,
            steps: n,
            remaining,
        })
    }

    /// Green function of the walk killed on leaving the word ball of
    /// radius `radius`. Steps until `r^t` times the live mass drops below
    /// `tol` times the value at `e`, or `max_steps`.
    pub fn killed<E: Executor>(
        m: &Measure,
        r: f64,
        radius: u32,
        tol: f64,
        max_steps: usize,
        budget: MemoryBudget,
        exec: &E,
    ) -> Result<Self, GreenError> {
        let ball = make_ball(m, radius, 3, budget)?;
        let walk = Walk::<f64>::new(&ball, &forward_terms(m));
        let mut cur = vec![0.0; ball.len()];
        cur[0] = 1.0;
        let mut values = cur.clone();
        let mut next = vec![0.0; ball.len()];
        let mut rt = 1.0;
        let mut steps = 0;
        let mut remaining = 1.0;
        while steps < max_steps {
            walk.step(exec, &cur, &mut next, radius)
                .expect("floats do not overflow");
            core::mem::swap(&mut cur, &mut next);
            rt *= r;
            steps += 1;
            let mut mass = 0.0;
            for (acc, v) in values.iter_mut().zip(&cur) {
                *acc += rt * v;
                mass += v;
            }
            remaining = rt * mass;
            if remaining <= tol * values[0] || remaining == 0.0 {
                break;
            }
        }
        Ok(GreenField {
            ball,
            values,
            r,
            valid: radius,
            steps,
            remaining,
        })
    }

    pub fn ball(&self) -> &WordBall {
        &self.ball
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn valid_radius(&self) -> u32 {
        self.valid
    }
}

fn make_ball(
    m: &Measure,
    radius: u32,
    fields: usize,
    budget: MemoryBudget,
) -> Result<WordBall, GreenError> {
    let need = ball_size(m.group(), radius).saturating_mul((NODE_BYTES + 8 * fields) as u128);
    if !budget.fits(need) {
        return Err(MeasureError::Budget {
            largest_completed: 0,
            partial: None,
        }
        .into());
    }
    Ok(WordBall::new(m.group(), radius, m.support_radius()))
}

impl GreenFunction for GreenField {
    fn group(&self) -> &GroupSpec {
        self.ball.spec()
    }

    fn r(&self) -> f64 {
        self.r
    }

    fn from_identity(&self, g: &GroupElement) -> Option<f64> {
        if self.group().word_len(g) > self.valid as u64 {
            return None;
        }
        self.ball.locate(g).map(|v| self.values[v as usize])
    }
}
