use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use super::cone::word_ball;
use super::graph::{AutomatonGraph, Bundle, Predicate, Vertex};
use super::AutomatonError;
use crate::freeprod::{factor_letters, FactorElement, FactorKind, GroupElement, GroupSpec};

/// An ordered alphabet of letters evaluated in a group.
///
/// Several letters may evaluate to the same element.
pub trait LetterSystem {
    type Letter: Clone + Ord;
    type Elem: Clone + Ord;
    fn value(&self, l: &Self::Letter) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn is_identity(&self, a: &Self::Elem) -> bool;
    /// Letters evaluating to `g`.
    fn spellings(&self, g: &Self::Elem) -> Vec<Self::Letter>;
}

/// Letters are the non-identity factor elements.
pub struct FreeProductLetters<'a> {
    pub spec: &'a GroupSpec,
}

impl LetterSystem for FreeProductLetters<'_> {
    type Letter = FactorElement;
    type Elem = GroupElement;

    fn value(&self, l: &FactorElement) -> GroupElement {
        self.spec.from_syllable(l)
    }

    fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.spec.mul(a, b)
    }

    fn inv(&self, a: &GroupElement) -> GroupElement {
        self.spec.inv(a)
    }

    fn is_identity(&self, a: &GroupElement) -> bool {
        a.is_identity()
    }

    fn spellings(&self, g: &GroupElement) -> Vec<FactorElement> {
        match g.syllables() {
            [s] => vec![s.clone()],
            _ => Vec::new(),
        }
    }
}

/// P-set after reading `sigma` from a vertex with P-set `p`:
///
/// `{x in B : x = sigma^-1 sigma', sigma' < sigma} u {x in B : x = sigma^-1 y sigma', y in p}`.
///
/// `ball` must contain the identity so that a forbidden step shows up as
/// `e` in the result.
pub fn p_step<A: LetterSystem>(
    alpha: &A,
    ball: &[A::Elem],
    p: &BTreeSet<A::Elem>,
    sigma: &A::Letter,
) -> BTreeSet<A::Elem> {
    let s = alpha.value(sigma);
    let shifted: Vec<A::Elem> = p.iter().map(|y| alpha.mul(&alpha.inv(y), &s)).collect();
    let mut out = BTreeSet::new();
    for x in ball {
        let smaller = alpha.spellings(&alpha.mul(&s, x)).iter().any(|l| l < sigma);
        if smaller
            || shifted
                .iter()
                .any(|h| !alpha.spellings(&alpha.mul(h, x)).is_empty())
        {
            out.insert(x.clone());
        }
    }
    out
}

/// P-sets along `letters` from the empty set. Fails with the position of
/// the first letter whose P-set contains the identity.
pub fn trace_psets<A: LetterSystem>(
    alpha: &A,
    ball: &[A::Elem],
    letters: &[A::Letter],
) -> Result<Vec<BTreeSet<A::Elem>>, usize> {
    let mut p = BTreeSet::new();
    let mut out = Vec::with_capacity(letters.len());
    for (i, l) in letters.iter().enumerate() {
        p = p_step(alpha, ball, &p, l);
        if p.iter().any(|x| alpha.is_identity(x)) {
            return Err(i);
        }
        out.push(p.clone());
    }
    Ok(out)
}

// Outcome of reading a letter: the new P-set, or None when it holds e.
type Step = Option<Vec<GroupElement>>;

/// Lexicographic refinement of `g0`: vertices are the pairs (vertex, P-set)
/// reachable from (start, {}), with P-sets in `B_C \ {e}`.
///
/// For `Z^d` factors letters of word length up to `2C + 2` are read
/// explicitly. Longer letters cannot interact with `B_C` except through
/// translation, so they share the outcome of the letters of length `2C + 1`
/// and `2C + 2`; that class becomes an `Except` bundle. When those letters
/// disagree the graph is flagged incomplete.
pub fn refine_g1(g0: &AutomatonGraph, c: u64) -> Result<AutomatonGraph, AutomatonError> {
    if c == 0 {
        return Err(AutomatonError::Invalid("C must be at least 1".into()));
    }
    if g0.vertices.is_empty() {
        return Err(AutomatonError::Empty);
    }
    let spec = &g0.spec;
    let alpha = FreeProductLetters { spec };
    let ball = word_ball(spec, c);
    let probe_len = 2 * c + 2;
    let letters: Vec<Vec<FactorElement>> = (1..=spec.n_factors() as u16)
        .map(|j| match spec.kind(j) {
            FactorKind::FiniteCyclic { order } => factor_letters(spec, j, order as u64),
            FactorKind::FreeAbelian { .. } => factor_letters(spec, j, probe_len),
        })
        .collect();

    let mut complete = g0.complete;
    let mut index: BTreeMap<(usize, Vec<GroupElement>), usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut bundles = Vec::new();
    let mut queue = VecDeque::new();
    index.insert((g0.start, Vec::new()), 0);
    vertices.push(Vertex {
        cone_type: g0.vertices[g0.start].cone_type,
        pset: Some(Vec::new()),
    });
    queue.push_back((g0.start, Vec::<GroupElement>::new()));

    while let Some((v, p)) = queue.pop_front() {
        let source = index[&(v, p.clone())];
        let pset: BTreeSet<GroupElement> = p.iter().cloned().collect();
        for b0 in g0.outgoing(v) {
            let infinite = !spec.kind(b0.factor).is_finite();
            let admitted: Vec<&FactorElement> = letters[b0.factor as usize - 1]
                .iter()
                .filter(|s| b0.predicate.admits(s))
                .collect();
            let mut groups: BTreeMap<Step, Vec<FactorElement>> = BTreeMap::new();
            for s in &admitted {
                let next = p_step(&alpha, &ball, &pset, s);
                let key = if next.iter().any(|x| x.is_identity()) {
                    None
                } else {
                    Some(next.into_iter().collect())
                };
                groups.entry(key).or_default().push((*s).clone());
            }
            // Outcome shared by all long letters, when the bundle has any.
            let generic: Option<Step> = if infinite && !matches!(b0.predicate, Predicate::Only(_)) {
                let outer: Vec<&Step> = groups
                    .iter()
                    .filter(|(_, ls)| ls.iter().any(|s| spec.syllable_len(s) > 2 * c))
                    .map(|(k, _)| k)
                    .collect();
                if outer.len() == 1 {
                    Some(outer[0].clone())
                } else {
                    complete = false;
                    None
                }
            } else {
                None
            };
            for (key, list) in &groups {
                let Some(next) = key else { continue };
                let predicate = if generic.as_ref() == Some(key) {
                    let mut except: Vec<FactorElement> = admitted
                        .iter()
                        .filter(|s| !list.contains(s))
                        .map(|s| (*s).clone())
                        .collect();
                    if let Predicate::Except(l) = &b0.predicate {
                        except.extend(l.iter().cloned());
                    }
                    except.sort();
                    except.dedup();
                    if except.is_empty() {
                        Predicate::NonIdentity
                    } else {
                        Predicate::Except(except)
                    }
                } else if !infinite
                    && list.len() == admitted.len()
                    && b0.predicate == Predicate::NonIdentity
                {
                    Predicate::NonIdentity
                } else {
                    Predicate::Only(list.clone())
                };
                let k = (b0.target, next.clone());
                let target = match index.get(&k) {
                    Some(&t) => t,
                    None => {
                        let t = vertices.len();
                        index.insert(k.clone(), t);
                        vertices.push(Vertex {
                            cone_type: g0.vertices[b0.target].cone_type,
                            pset: Some(next.clone()),
                        });
                        queue.push_back(k);
                        t
                    }
                };
                bundles.push(Bundle {
                    source,
                    target,
                    factor: b0.factor,
                    predicate,
                });
            }
        }
    }
    Ok(AutomatonGraph {
        spec: spec.clone(),
        vertices,
        start: 0,
        bundles,
        c,
        complete,
    })
}
