use alloc::vec;
use alloc::vec::Vec;

use super::{FactorElement, FactorId, GroupElement, GroupError, GroupSpec};

/// Path in the relative Cayley graph: consecutive vertices differ by a
/// single factor element (a jump).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativePath {
    pub vertices: Vec<GroupElement>,
    pub jumps: Vec<FactorElement>,
}

impl RelativePath {
    pub fn len(&self) -> usize {
        self.jumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }
}

/// Path in the word Cayley graph. `transition[i]` marks vertices that come
/// from the relative geodesic being lifted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedPath {
    pub vertices: Vec<GroupElement>,
    pub transition: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentRecord {
    pub factor: FactorId,
    pub entry: usize,
    pub exit: usize,
    /// Word distance between entry and exit vertices.
    pub travel: u64,
}

/// The relative geodesic from `x` to `z`: `x` times the prefixes of the
/// normal form of `x^-1 z`. In a free product it is the unique one.
pub fn relative_geodesic(
    spec: &GroupSpec,
    x: &GroupElement,
    z: &GroupElement,
) -> Result<RelativePath, GroupError> {
    spec.check_element(x)?;
    spec.check_element(z)?;
    let diff = spec.mul(&spec.inv(x), z);
    let mut vertices = vec![x.clone()];
    let mut cur = x.clone();
    for s in diff.syllables() {
        cur = spec.mul_syllable(&cur, s);
        vertices.push(cur.clone());
    }
    Ok(RelativePath {
        vertices,
        jumps: diff.syllables().to_vec(),
    })
}

/// Replaces every jump of a relative path by a factor geodesic.
pub fn lift_path(spec: &GroupSpec, p: &RelativePath) -> Result<LiftedPath, GroupError> {
    let start = p.vertices.first().cloned().unwrap_or_default();
    spec.check_element(&start)?;
    let mut vertices = vec![start.clone()];
    let mut transition = vec![true];
    let mut cur = start;
    for jump in &p.jumps {
        spec.check_syllable(jump)?;
        let steps = spec.factor_geodesic(jump);
        let n = steps.len();
        for (i, step) in steps.iter().enumerate() {
            cur = spec.mul_syllable(&cur, step);
            vertices.push(cur.clone());
            transition.push(i + 1 == n);
        }
    }
    Ok(LiftedPath {
        vertices,
        transition,
    })
}

/// Anything with a vertex list.
pub trait PathVertices {
    fn path_vertices(&self) -> &[GroupElement];
}

impl PathVertices for RelativePath {
    fn path_vertices(&self) -> &[GroupElement] {
        &self.vertices
    }
}

impl PathVertices for LiftedPath {
    fn path_vertices(&self) -> &[GroupElement] {
        &self.vertices
    }
}

/// Maximal runs of consecutive edges inside one factor coset.
pub fn components<P: PathVertices + ?Sized>(spec: &GroupSpec, p: &P) -> Vec<ComponentRecord> {
    let v = p.path_vertices();
    let mut out: Vec<ComponentRecord> = Vec::new();
    for i in 0..v.len().saturating_sub(1) {
        let step = spec.mul(&spec.inv(&v[i]), &v[i + 1]);
        // Edges are single syllables; a trivial edge joins the current run.
        let factor = match step.syllables() {
            [s] => s.factor,
            [] => match out.last() {
                Some(r) if r.exit == i => r.factor,
                _ => continue,
            },
            _ => continue,
        };
        match out.last_mut() {
            Some(r) if r.factor == factor && r.exit == i => r.exit = i + 1,
            _ => out.push(ComponentRecord {
                factor,
                entry: i,
                exit: i + 1,
                travel: 0,
            }),
        }
    }
    for r in &mut out {
        r.travel = spec.word_len(&spec.mul(&spec.inv(&v[r.entry]), &v[r.exit]));
    }
    out
}

/// Element `sigma` of word length at most 1 such that the relative geodesic
/// from `e` to `g sigma h` passes through `g`. `None` stands for the identity.
pub fn extension_element(
    spec: &GroupSpec,
    g: &GroupElement,
    h: &GroupElement,
) -> Result<Option<FactorElement>, GroupError> {
    if spec.n_factors() < 2 {
        return Err(GroupError::TooFewFactors);
    }
    spec.check_element(g)?;
    spec.check_element(h)?;
    match (g.last(), h.first()) {
        (Some(a), Some(b)) if a.factor == b.factor => {
            let other = (1..=spec.n_factors() as FactorId)
                .find(|&id| id != a.factor)
                .unwrap();
            Ok(Some(spec.standard_generator(other)))
        }
        _ => Ok(None),
    }
}
