use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use hashbrown::{HashMap, HashSet};

use super::graph::{AutomatonGraph, Bundle, Predicate, Vertex};
use super::AutomatonError;
use crate::freeprod::{factor_letters, FactorId, GroupElement, GroupSpec};
use crate::measures::Measure;

/// Default fingerprint radius `2 d_mu + 1`.
pub fn default_c(m: &Measure) -> u64 {
    2 * m.support_radius() as u64 + 1
}

/// Elements of word length at most `c`, in element order.
pub(crate) fn word_ball(spec: &GroupSpec, c: u64) -> Vec<GroupElement> {
    let mut out: Vec<GroupElement> = spec
        .enumerate_ball(c as usize, c)
        .filter(|g| spec.word_len(g) <= c)
        .collect();
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeType {
    pub index: usize,
    /// Shortlex-least element of the class inside the enumerated ball.
    pub representative: GroupElement,
    /// `g -> d^(e, rep g) - d^(e, rep)` over [`ConeTypes::word_ball`].
    pub fingerprint: Vec<i64>,
    /// Distinct fingerprints merged into this type.
    pub fingerprints: usize,
    pub members: usize,
}

/// Cone types of the elements of the `(m, B)` ball.
///
/// Elements are first split by `rho_C` fingerprint, then fingerprint classes
/// with the same reduced extensions (tested on the two-syllable probe ball)
/// are merged. Near the truncation boundary the fingerprint separates
/// elements of one type (`a` and `a^3` differ on `a^-1`), so the merge step
/// is what recovers the type count.
#[derive(Debug, Clone)]
pub struct ConeTypes {
    pub spec: GroupSpec,
    pub m: usize,
    pub b: u64,
    pub c: u64,
    pub word_ball: Vec<GroupElement>,
    pub types: Vec<ConeType>,
    pub fingerprint_classes: usize,
    /// Equal fingerprints always came with equal extension sets.
    pub sound: bool,
    probe: Vec<GroupElement>,
    by_extensions: HashMap<Vec<bool>, usize>,
}

impl ConeTypes {
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    fn extensions(&self, g: &GroupElement) -> Vec<bool> {
        extension_set(&self.spec, &self.probe, g)
    }

    pub fn fingerprint(&self, g: &GroupElement) -> Vec<i64> {
        let base = g.relative_len() as i64;
        self.word_ball
            .iter()
            .map(|x| self.spec.mul(g, x).relative_len() as i64 - base)
            .collect()
    }

    /// Type of `g`, if its extension set occurs in the ball.
    pub fn type_of(&self, g: &GroupElement) -> Option<usize> {
        self.by_extensions.get(&self.extensions(g)).copied()
    }
}

fn extension_set(spec: &GroupSpec, probe: &[GroupElement], g: &GroupElement) -> Vec<bool> {
    let n = g.relative_len();
    probe
        .iter()
        .map(|x| spec.mul(g, x).relative_len() == n + x.relative_len())
        .collect()
}

pub fn cone_types(spec: &GroupSpec, m: usize, b: u64, c: u64) -> Result<ConeTypes, AutomatonError> {
    if b == 0 || c == 0 {
        return Err(AutomatonError::Invalid(alloc::format!(
            "need B >= 1 and C >= 1, got B = {b}, C = {c}"
        )));
    }
    let word_ball = word_ball(spec, c);
    let probe: Vec<GroupElement> = spec.enumerate_ball(2, b.min(2)).skip(1).collect();
    let mut out = ConeTypes {
        spec: spec.clone(),
        m,
        b,
        c,
        word_ball,
        types: Vec::new(),
        fingerprint_classes: 0,
        sound: true,
        probe,
        by_extensions: HashMap::new(),
    };
    let mut by_fingerprint: HashMap<Vec<i64>, Vec<bool>> = HashMap::new();
    let mut seen: Vec<HashSet<Vec<i64>>> = Vec::new();
    for g in spec.enumerate_ball(m, b) {
        let fp = out.fingerprint(&g);
        let ext = out.extensions(&g);
        match by_fingerprint.get(&fp) {
            Some(prev) if *prev != ext => out.sound = false,
            Some(_) => {}
            None => {
                by_fingerprint.insert(fp.clone(), ext.clone());
            }
        }
        let idx = match out.by_extensions.get(&ext) {
            Some(&i) => i,
            None => {
                let i = out.types.len();
                out.by_extensions.insert(ext, i);
                out.types.push(ConeType {
                    index: i,
                    representative: g.clone(),
                    fingerprint: fp.clone(),
                    fingerprints: 0,
                    members: 0,
                });
                seen.push(HashSet::new());
                i
            }
        };
        out.types[idx].members += 1;
        if seen[idx].insert(fp) {
            out.types[idx].fingerprints += 1;
        }
    }
    out.fingerprint_classes = by_fingerprint.len();
    Ok(out)
}

/// One vertex per cone type; bundles found by appending every letter of
/// factor word length at most `B` to each representative.
pub fn build_g0(types: &ConeTypes) -> AutomatonGraph {
    let spec = &types.spec;
    let vertices: Vec<Vertex> = types
        .types
        .iter()
        .map(|t| Vertex {
            cone_type: t.index,
            pset: None,
        })
        .collect();
    let mut bundles = Vec::new();
    let mut complete = true;
    for t in &types.types {
        let rho = &t.representative;
        for j in 1..=spec.n_factors() as FactorId {
            let letters = factor_letters(spec, j, types.b);
            let finite = spec.kind(j).is_finite();
            let mut targets: BTreeMap<usize, Vec<_>> = BTreeMap::new();
            let mut blocked = 0usize;
            for s in letters.iter() {
                let g = spec.mul_syllable(rho, s);
                if g.relative_len() != rho.relative_len() + 1 {
                    blocked += 1;
                    continue;
                }
                match types.type_of(&g) {
                    Some(v) => targets.entry(v).or_default().push(s.clone()),
                    None => complete = false,
                }
            }
            if targets.len() == 1 && blocked == 0 {
                let (&target, _) = targets.iter().next().expect("one target");
                bundles.push(Bundle {
                    source: t.index,
                    target,
                    factor: j,
                    predicate: Predicate::NonIdentity,
                });
                continue;
            }
            if !targets.is_empty() && !finite {
                complete = false;
            }
            for (target, list) in targets {
                bundles.push(Bundle {
                    source: t.index,
                    target,
                    factor: j,
                    predicate: Predicate::Only(list),
                });
            }
        }
    }
    AutomatonGraph {
        spec: spec.clone(),
        vertices,
        start: 0,
        bundles,
        c: types.c,
        complete,
    }
}
