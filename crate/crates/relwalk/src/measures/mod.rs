//! Finitely supported probability measures and their convolution powers.

mod powers;
mod validate;

pub(crate) use powers::run_walk;
pub use powers::{
    distribution, distribution_with, return_sequence, return_sequence_with, ReturnSequence,
};
pub use validate::{validate, validate_with, Aperiodicity, WalkReport};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::freeprod::{GroupElement, GroupError, GroupSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum MeasureError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("weight of {0} is not positive")]
    NonPositive(String),
    #[error("weights sum to {0}, not 1")]
    NotNormalized(String),
    #[error("cannot parse weight `{0}`")]
    BadWeight(String),
    #[error("arithmetic modes differ")]
    ModeMismatch,
    #[error("empty support")]
    Empty,
    #[error("memory budget exceeded; completed up to n = {largest_completed}")]
    Budget {
        largest_completed: usize,
        partial: Option<ReturnSequence>,
    },
}

/// A finitely supported measure on a free product.
///
/// Built through [`Measure::exact`] or [`Measure::float`], which insist on a
/// probability; sub-probabilities only come out of truncated computations.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    group: GroupSpec,
    support: Vec<GroupElement>,
    weights: Weights,
}

pub(crate) fn parse_fraction(text: &str) -> Option<BigRational> {
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl Measure {
    pub fn exact(
        group: GroupSpec,
        pairs: Vec<(GroupElement, BigRational)>,
    ) -> Result<Self, MeasureError> {
        let mut map: BTreeMap<GroupElement, BigRational> = BTreeMap::new();
        for (g, w) in pairs {
            group.check_element(&g)?;
            if !w.is_positive() {
                return Err(MeasureError::NonPositive(format!("{g}")));
            }
            *map.entry(g).or_insert_with(BigRational::zero) += w;
        }
        if map.is_empty() {
            return Err(MeasureError::Empty);
        }
        let total: BigRational = map.values().cloned().sum();
        if !total.is_one() {
            return Err(MeasureError::NotNormalized(format!("{total}")));
        }
        let (support, w) = map.into_iter().unzip();
        Ok(Measure {
            group,
            support,
            weights: Weights::Exact(w),
        })
    }

    pub fn float(group: GroupSpec, pairs: Vec<(GroupElement, f64)>) -> Result<Self, MeasureError> {
        let mut map: BTreeMap<GroupElement, f64> = BTreeMap::new();
        for (g, w) in pairs {
            group.check_element(&g)?;
            if !(w > 0.0) || !w.is_finite() {
                return Err(MeasureError::NonPositive(format!("{g}")));
            }
            *map.entry(g).or_insert(0.0) += w;
        }
        if map.is_empty() {
            return Err(MeasureError::Empty);
        }
        let total = crate::engine::neumaier_sum(&map.values().copied().collect::<Vec<_>>());
        if (total - 1.0).abs() > 1e-12 {
            return Err(MeasureError::NotNormalized(format!("{total}")));
        }
        let (support, w) = map.into_iter().unzip();
        Ok(Measure {
            group,
            support,
            weights: Weights::Float(w),
        })
    }

    /// Parses `(element, "p/q")` pairs into an exact measure.
    pub fn parse(group: GroupSpec, pairs: &[(&str, &str)]) -> Result<Self, MeasureError> {
        let mut out = Vec::with_capacity(pairs.len());
        for (g, w) in pairs {
            let g = group.parse_element(g)?;
            let w = parse_fraction(w).ok_or_else(|| MeasureError::BadWeight((*w).into()))?;
            out.push((g, w));
        }
        Measure::exact(group, out)
    }

    /// Uniform measure on the standard generators and their inverses.
    pub fn simple(group: &GroupSpec) -> Self {
        let gens = group.generators();
        let w = BigRational::new(BigInt::one(), BigInt::from(gens.len()));
        let pairs = gens
            .iter()
            .map(|s| (group.from_syllable(s), w.clone()))
            .collect();
        Measure::exact(group.clone(), pairs).expect("uniform weights sum to one")
    }

    /// Holds with probability `hold`, otherwise takes a simple-walk step.
    pub fn lazy(group: &GroupSpec, hold: BigRational) -> Self {
        let gens = group.generators();
        let step =
            (BigRational::one() - &hold) / BigRational::from_integer(BigInt::from(gens.len()));
        let mut pairs: Vec<(GroupElement, BigRational)> = gens
            .iter()
            .map(|s| (group.from_syllable(s), step.clone()))
            .collect();
        pairs.push((GroupElement::identity(), hold));
        Measure::exact(group.clone(), pairs).expect("lazy weights sum to one")
    }

    pub(crate) fn from_parts(
        group: GroupSpec,
        support: Vec<GroupElement>,
        weights: Weights,
    ) -> Self {
        Measure {
            group,
            support,
            weights,
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn support(&self) -> &[GroupElement] {
        &self.support
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn mode(&self) -> Mode {
        match self.weights {
            Weights::Exact(_) => Mode::Exact,
            Weights::Float(_) => Mode::Float,
        }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn weight_f64(&self, i: usize) -> f64 {
        match &self.weights {
            Weights::Exact(w) => rational_to_f64(&w[i]),
            Weights::Float(w) => w[i],
        }
    }

    /// Float weights in support order.
    pub fn float_weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight_f64(i)).collect()
    }

    /// Weight of `g` as a float (0 off the support).
    pub fn get(&self, g: &GroupElement) -> f64 {
        match self.support.binary_search(g) {
            Ok(i) => self.weight_f64(i),
            Err(_) => 0.0,
        }
    }

    pub fn get_exact(&self, g: &GroupElement) -> Option<BigRational> {
        let i = self.support.binary_search(g).ok();
        match (&self.weights, i) {
            (Weights::Exact(w), Some(i)) => Some(w[i].clone()),
            (Weights::Exact(_), None) => Some(BigRational::zero()),
            _ => None,
        }
    }

    pub fn total_mass(&self) -> f64 {
        crate::engine::neumaier_sum(&self.float_weights())
    }

    /// `d_mu`: the largest word length in the support.
    pub fn support_radius(&self) -> u32 {
        self.support
            .iter()
            .map(|g| self.group.word_len(g) as u32)
            .max()
            .unwrap_or(0)
    }

    /// True if the support only has elements of at most one syllable.
    pub fn is_adapted(&self) -> bool {
        self.support.iter().all(|g| g.relative_len() <= 1)
    }

    pub fn is_symmetric(&self) -> bool {
        self.support.iter().enumerate().all(|(i, g)| {
            let inv = self.group.inv(g);
            match self.support.binary_search(&inv) {
                Err(_) => false,
                Ok(j) => match &self.weights {
                    Weights::Exact(w) => w[i] == w[j],
                    Weights::Float(w) => (w[i] - w[j]).abs() <= 1e-12 * w[i].abs().max(w[j].abs()),
                },
            }
        })
    }

    pub fn to_float(&self) -> Measure {
        Measure {
            group: self.group.clone(),
            support: self.support.clone(),
            weights: Weights::Float(self.float_weights()),
        }
    }

    /// Common denominator `D` and integer weights `D * mu(s)`; `None` in
    /// float mode.
    pub(crate) fn integer_weights(&self) -> Option<(BigUint, Vec<BigUint>)> {
        let Weights::Exact(w) = &self.weights else {
            return None;
        };
        let mut d = BigInt::one();
        for q in w {
            d = d.lcm(q.denom());
        }
        let ints = w
            .iter()
            .map(|q| {
                (q.numer() * (&d / q.denom()))
                    .to_biguint()
                    .expect("positive weight")
            })
            .collect();
        Some((d.to_biguint().expect("positive denominator"), ints))
    }

    /// The pushforward under `g -> g^-1`.
    pub fn reflected(&self) -> Measure {
        let mut items: Vec<(GroupElement, usize)> = self
            .support
            .iter()
            .enumerate()
            .map(|(i, g)| (self.group.inv(g), i))
            .collect();
        items.sort();
        let weights = match &self.weights {
            Weights::Exact(w) => Weights::Exact(items.iter().map(|(_, i)| w[*i].clone()).collect()),
            Weights::Float(w) => Weights::Float(items.iter().map(|(_, i)| w[*i]).collect()),
        };
        Measure {
            group: self.group.clone(),
            support: items.into_iter().map(|(g, _)| g).collect(),
            weights,
        }
    }
}

/// `(m * n)(g) = sum_x m(x) n(x^-1 g)`.
pub fn convolve(m: &Measure, n: &Measure) -> Result<Measure, MeasureError> {
    if m.group != n.group {
        return Err(GroupError::Mismatch("measures live on different groups".into()).into());
    }
    let g = &m.group;
    match (&m.weights, &n.weights) {
        (Weights::Exact(a), Weights::Exact(b)) => {
            let mut map: BTreeMap<GroupElement, BigRational> = BTreeMap::new();
            for (x, wx) in m.support.iter().zip(a) {
                for (y, wy) in n.support.iter().zip(b) {
                    *map.entry(g.mul(x, y)).or_insert_with(BigRational::zero) += wx * wy;
                }
            }
            let (support, w) = map.into_iter().unzip();
            Ok(Measure {
                group: g.clone(),
                support,
                weights: Weights::Exact(w),
            })
        }
        (Weights::Float(a), Weights::Float(b)) => {
            let mut map: BTreeMap<GroupElement, crate::engine::Neumaier> = BTreeMap::new();
            for (x, wx) in m.support.iter().zip(a) {
                for (y, wy) in n.support.iter().zip(b) {
                    map.entry(g.mul(x, y)).or_default().add(wx * wy);
                }
            }
            let (support, w) = map.into_iter().map(|(k, v)| (k, v.value())).unzip();
            Ok(Measure {
                group: g.clone(),
                support,
                weights: Weights::Float(w),
            })
        }
        _ => Err(MeasureError::ModeMismatch),
    }
}
