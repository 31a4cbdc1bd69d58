use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::GroupError;

/// Factor index, starting at 1.
pub type FactorId = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorKind {
    FreeAbelian { rank: u32 },
    FiniteCyclic { order: u32 },
}

impl FactorKind {
    /// Number of stored coordinates.
    pub fn dim(&self) -> usize {
        match *self {
            FactorKind::FreeAbelian { rank } => rank as usize,
            FactorKind::FiniteCyclic { .. } => 1,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FactorKind::FiniteCyclic { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorSpec {
    pub id: FactorId,
    pub kind: FactorKind,
    pub generators: Vec<String>,
}

/// A single syllable: a non-identity element of one factor.
///
/// Coordinates are an integer vector for `Z^d` and a residue in `[0, m)` for
/// `Z/m`. Ordering is by factor id, then lexicographic on coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactorElement {
    pub factor: FactorId,
    pub coords: Vec<i64>,
}

impl FactorElement {
    pub fn new(factor: FactorId, coords: Vec<i64>) -> Self {
        FactorElement { factor, coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for FactorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:(", self.factor)?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Element of the free product in syllable normal form.
///
/// Adjacent syllables belong to different factors and no syllable is a
/// factor identity; the empty list is the identity. Elements compare
/// shortlex: syllable count first, then syllables lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupElement {
    syllables: Vec<FactorElement>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            syllables: Vec::new(),
        }
    }

    pub fn syllables(&self) -> &[FactorElement] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Relative length `d^(e, g)`.
    pub fn relative_len(&self) -> usize {
        self.syllables.len()
    }

    pub fn first(&self) -> Option<&FactorElement> {
        self.syllables.first()
    }

    pub fn last(&self) -> Option<&FactorElement> {
        self.syllables.last()
    }

    /// Builds an element from syllables already in normal form.
    pub(crate) fn from_reduced(syllables: Vec<FactorElement>) -> Self {
        debug_assert!(syllables.windows(2).all(|w| w[0].factor != w[1].factor));
        GroupElement { syllables }
    }

    pub fn into_syllables(self) -> Vec<FactorElement> {
        self.syllables
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.syllables
            .len()
            .cmp(&other.syllables.len())
            .then_with(|| self.syllables.cmp(&other.syllables))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("e");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<FactorSpec>,
}

impl GroupSpec {
    pub fn new(factors: Vec<FactorSpec>) -> Result<Self, GroupError> {
        if factors.is_empty() {
            return Err(GroupError::InvalidSpec("no factors".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.id as usize != i + 1 {
                return Err(GroupError::InvalidSpec(format!(
                    "factor ids must be 1..N in order, found {} at position {}",
                    f.id,
                    i + 1
                )));
            }
            match f.kind {
                FactorKind::FreeAbelian { rank: 0 } => {
                    return Err(GroupError::InvalidSpec(format!(
                        "factor {} has rank 0",
                        f.id
                    )))
                }
                FactorKind::FiniteCyclic { order } if order < 2 => {
                    return Err(GroupError::InvalidSpec(format!(
                        "factor {} has order {order}",
                        f.id
                    )))
                }
                _ => {}
            }
            if !f.generators.is_empty() && f.generators.len() != f.kind.dim() {
                return Err(GroupError::InvalidSpec(format!(
                    "factor {} declares {} generator names, expected {}",
                    f.id,
                    f.generators.len(),
                    f.kind.dim()
                )));
            }
        }
        Ok(GroupSpec { factors })
    }

    /// Builds a spec with ids `1..N` and default generator names `a, b, ...`
    /// (indexed `a1, a2, ...` for higher rank).
    pub fn from_kinds(kinds: &[FactorKind]) -> Result<Self, GroupError> {
        let factors = kinds
            .iter()
            .enumerate()
            .map(|(i, &kind)| {
                let letter = (b'a' + (i % 26) as u8) as char;
                let generators = if kind.dim() == 1 {
                    vec![letter.to_string()]
                } else {
                    (1..=kind.dim()).map(|j| format!("{letter}{j}")).collect()
                };
                FactorSpec {
                    id: (i + 1) as FactorId,
                    kind,
                    generators,
                }
            })
            .collect();
        GroupSpec::new(factors)
    }

    /// `Z * Z * ...` with `n` factors, i.e. the free group of rank `n`.
    pub fn free_group(n: usize) -> Self {
        let kinds = vec![FactorKind::FreeAbelian { rank: 1 }; n];
        GroupSpec::from_kinds(&kinds).expect("rank-one factors are valid")
    }

    pub fn factors(&self) -> &[FactorSpec] {
        &self.factors
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, id: FactorId) -> Result<&FactorSpec, GroupError> {
        if id == 0 {
            return Err(GroupError::UnknownFactor(id));
        }
        self.factors
            .get(id as usize - 1)
            .ok_or(GroupError::UnknownFactor(id))
    }

    pub fn kind(&self, id: FactorId) -> FactorKind {
        self.factors[id as usize - 1].kind
    }

    /// Checks a syllable against the spec: known factor, right dimension,
    /// residue in range. Identity syllables pass.
    pub fn check_syllable(&self, s: &FactorElement) -> Result<(), GroupError> {
        let f = self.factor(s.factor)?;
        if s.coords.len() != f.kind.dim() {
            return Err(GroupError::Mismatch(s.to_string()));
        }
        if let FactorKind::FiniteCyclic { order } = f.kind {
            if s.coords[0] < 0 || s.coords[0] >= order as i64 {
                return Err(GroupError::Mismatch(s.to_string()));
            }
        }
        Ok(())
    }

    pub fn check_element(&self, g: &GroupElement) -> Result<(), GroupError> {
        for (i, s) in g.syllables.iter().enumerate() {
            self.check_syllable(s)?;
            if s.is_zero() || (i > 0 && g.syllables[i - 1].factor == s.factor) {
                return Err(GroupError::Mismatch(g.to_string()));
            }
        }
        Ok(())
    }

    /// Word length of a syllable in its factor.
    pub fn syllable_len(&self, s: &FactorElement) -> u64 {
        match self.kind(s.factor) {
            FactorKind::FreeAbelian { .. } => s.coords.iter().map(|c| c.unsigned_abs()).sum(),
            FactorKind::FiniteCyclic { order } => {
                let k = s.coords[0].rem_euclid(order as i64) as u64;
                k.min(order as u64 - k)
            }
        }
    }

    /// Returns `(relative length, word length)`.
    pub fn lengths(&self, g: &GroupElement) -> (usize, u64) {
        (g.relative_len(), self.word_len(g))
    }

    pub fn word_len(&self, g: &GroupElement) -> u64 {
        g.syllables.iter().map(|s| self.syllable_len(s)).sum()
    }

    pub fn factor_identity(&self, id: FactorId) -> FactorElement {
        FactorElement::new(id, vec![0; self.kind(id).dim()])
    }

    /// The positive first standard generator of a factor.
    pub fn standard_generator(&self, id: FactorId) -> FactorElement {
        let mut coords = vec![0; self.kind(id).dim()];
        coords[0] = 1;
        FactorElement::new(id, coords)
    }

    /// Standard generators of all factors with their inverses, in element order.
    pub fn generators(&self) -> Vec<FactorElement> {
        let mut out = Vec::new();
        for f in &self.factors {
            match f.kind {
                FactorKind::FreeAbelian { rank } => {
                    for j in 0..rank as usize {
                        for sign in [-1, 1] {
                            let mut c = vec![0; rank as usize];
                            c[j] = sign;
                            out.push(FactorElement::new(f.id, c));
                        }
                    }
                }
                FactorKind::FiniteCyclic { order } => {
                    out.push(FactorElement::new(f.id, vec![1]));
                    if order > 2 {
                        out.push(FactorElement::new(f.id, vec![order as i64 - 1]));
                    }
                }
            }
        }
        out.sort();
        out
    }

    fn reduce_coords(&self, s: &mut FactorElement) {
        if let FactorKind::FiniteCyclic { order } = self.kind(s.factor) {
            s.coords[0] = s.coords[0].rem_euclid(order as i64);
        }
    }

    /// Product of two elements of the same factor.
    pub fn factor_mul(&self, a: &FactorElement, b: &FactorElement) -> FactorElement {
        debug_assert_eq!(a.factor, b.factor);
        let mut out = FactorElement::new(
            a.factor,
            a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        );
        self.reduce_coords(&mut out);
        out
    }

    pub fn factor_inv(&self, a: &FactorElement) -> FactorElement {
        let mut out = FactorElement::new(a.factor, a.coords.iter().map(|x| -x).collect());
        self.reduce_coords(&mut out);
        out
    }

    /// Reduces an arbitrary list of factor elements to normal form.
    pub fn normalize(&self, raw: &[FactorElement]) -> Result<GroupElement, GroupError> {
        let mut stack: Vec<FactorElement> = Vec::with_capacity(raw.len());
        for item in raw {
            let f = self.factor(item.factor)?;
            if item.coords.len() != f.kind.dim() {
                return Err(GroupError::Mismatch(item.to_string()));
            }
            let mut s = item.clone();
            self.reduce_coords(&mut s);
            push_syllable(self, &mut stack, s);
        }
        Ok(GroupElement { syllables: stack })
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check_element(a)?;
        self.check_element(b)?;
        Ok(self.mul(a, b))
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check_element(a)?;
        Ok(self.inv(a))
    }

    /// Unchecked product of two normal forms.
    pub(crate) fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut stack = a.syllables.clone();
        let mut rest = b.syllables.iter();
        for s in rest.by_ref() {
            let merged_to_identity = match stack.last() {
                Some(top) if top.factor == s.factor => {
                    let m = self.factor_mul(top, s);
                    if m.is_zero() {
                        stack.pop();
                        true
                    } else {
                        *stack.last_mut().unwrap() = m;
                        false
                    }
                }
                _ => {
                    stack.push(s.clone());
                    false
                }
            };
            // Without cancellation the remaining syllables attach verbatim.
            if !merged_to_identity {
                stack.extend(rest.cloned());
                break;
            }
        }
        GroupElement { syllables: stack }
    }

    /// Unchecked inverse.
    pub(crate) fn inv(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            syllables: a
                .syllables
                .iter()
                .rev()
                .map(|s| self.factor_inv(s))
                .collect(),
        }
    }

    /// `g` times a single factor element (possibly the identity).
    pub(crate) fn mul_syllable(&self, g: &GroupElement, s: &FactorElement) -> GroupElement {
        let mut stack = g.syllables.clone();
        push_syllable(self, &mut stack, s.clone());
        GroupElement { syllables: stack }
    }

    /// Element made of one syllable (identity when `s` is trivial).
    pub fn from_syllable(&self, s: &FactorElement) -> GroupElement {
        let mut s = s.clone();
        self.reduce_coords(&mut s);
        if s.is_zero() {
            GroupElement::identity()
        } else {
            GroupElement { syllables: vec![s] }
        }
    }

    /// Parses `"1:(3,-4)|2:(1)"`; `"e"` or the empty string is the identity.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement, GroupError> {
        let t = text.trim();
        if t.is_empty() || t == "e" {
            return Ok(GroupElement::identity());
        }
        let mut raw = Vec::new();
        for part in t.split('|') {
            raw.push(
                self.parse_syllable(part)
                    .map_err(|_| GroupError::Parse(text.into()))?,
            );
        }
        self.normalize(&raw)
    }

    pub fn parse_syllable(&self, text: &str) -> Result<FactorElement, GroupError> {
        let err = || GroupError::Parse(text.into());
        let (id, rest) = text.trim().split_once(':').ok_or_else(err)?;
        let id: FactorId = id.trim().parse().map_err(|_| err())?;
        let inner = rest
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(err)?;
        let coords = inner
            .split(',')
            .map(|c| c.trim().parse::<i64>().map_err(|_| err()))
            .collect::<Result<Vec<_>, _>>()?;
        let f = self.factor(id)?;
        if coords.len() != f.kind.dim() {
            return Err(GroupError::Mismatch(text.into()));
        }
        let mut s = FactorElement::new(id, coords);
        self.reduce_coords(&mut s);
        Ok(s)
    }

    /// Unit steps of a factor geodesic from the identity to `s`: staircase,
    /// coordinate 1 first, for `Z^d`; the shorter way round, positive on
    /// ties, for `Z/m`.
    pub fn factor_geodesic(&self, s: &FactorElement) -> Vec<FactorElement> {
        let mut steps = Vec::new();
        match self.kind(s.factor) {
            FactorKind::FreeAbelian { rank } => {
                for (j, &c) in s.coords.iter().enumerate() {
                    let mut unit = vec![0; rank as usize];
                    unit[j] = c.signum();
                    for _ in 0..c.unsigned_abs() {
                        steps.push(FactorElement::new(s.factor, unit.clone()));
                    }
                }
            }
            FactorKind::FiniteCyclic { order } => {
                let m = order as i64;
                let k = s.coords[0].rem_euclid(m);
                let (count, unit) = if k <= m - k { (k, 1) } else { (m - k, m - 1) };
                for _ in 0..count {
                    steps.push(FactorElement::new(s.factor, vec![unit]));
                }
            }
        }
        steps
    }
}

fn push_syllable(spec: &GroupSpec, stack: &mut Vec<FactorElement>, s: FactorElement) {
    if s.is_zero() {
        return;
    }
    match stack.last_mut() {
        Some(top) if top.factor == s.factor => {
            let m = spec.factor_mul(top, &s);
            if m.is_zero() {
                stack.pop();
            } else {
                *top = m;
            }
        }
        _ => stack.push(s),
    }
}
