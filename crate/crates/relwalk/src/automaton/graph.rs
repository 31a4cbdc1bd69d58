use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;
use hashbrown::HashSet;

use super::AutomatonError;
use crate::freeprod::{
    ball_count, factor_letters, FactorElement, FactorId, GroupElement, GroupSpec,
};

/// Which non-identity elements of the bundle's factor label an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    NonIdentity,
    Only(Vec<FactorElement>),
    Except(Vec<FactorElement>),
}

impl Predicate {
    pub fn admits(&self, s: &FactorElement) -> bool {
        if s.is_zero() {
            return false;
        }
        match self {
            Predicate::NonIdentity => true,
            Predicate::Only(list) => list.binary_search(s).is_ok(),
            Predicate::Except(list) => list.binary_search(s).is_err(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub cone_type: usize,
    /// P-set of a `G_1` vertex; `None` in `G_0`.
    pub pset: Option<Vec<GroupElement>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub source: usize,
    pub target: usize,
    pub factor: FactorId,
    pub predicate: Predicate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonGraph {
    pub spec: GroupSpec,
    pub vertices: Vec<Vertex>,
    pub start: usize,
    pub bundles: Vec<Bundle>,
    pub c: u64,
    /// False when some predicate was only determined on a finite probe.
    pub complete: bool,
}

/// The four bullets of a relative automatic structure, checked on the
/// language truncated to `(m, B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub m: usize,
    pub b: u64,
    /// Bundles ending at the start vertex.
    pub entering_start: Vec<usize>,
    pub unreachable: Vec<usize>,
    /// Accepted sequences whose image is shorter than the sequence (first 16).
    pub non_geodesic: Vec<Vec<FactorElement>>,
    pub non_geodesic_count: usize,
    pub accepted: u128,
    pub ball: u128,
    /// Elements hit more than once (first 16).
    pub duplicates: Vec<GroupElement>,
    pub duplicate_count: usize,
    /// Images outside the truncated ball.
    pub outside: usize,
    /// Ball elements never hit.
    pub missing: u128,
}

impl StructureReport {
    pub fn no_edge_into_start(&self) -> bool {
        self.entering_start.is_empty()
    }

    pub fn all_reachable(&self) -> bool {
        self.unreachable.is_empty()
    }

    pub fn geodesic(&self) -> bool {
        self.non_geodesic_count == 0
    }

    pub fn bijective(&self) -> bool {
        self.duplicate_count == 0
            && self.outside == 0
            && self.missing == 0
            && self.accepted == self.ball
    }

    pub fn passed(&self) -> bool {
        self.no_edge_into_start() && self.all_reachable() && self.geodesic() && self.bijective()
    }
}

impl AutomatonGraph {
    pub fn outgoing(&self, v: usize) -> impl Iterator<Item = &Bundle> {
        self.bundles.iter().filter(move |b| b.source == v)
    }

    /// Vertices reached from `v` by reading `s`.
    pub fn successors(&self, v: usize, s: &FactorElement) -> Vec<usize> {
        self.outgoing(v)
            .filter(|b| b.factor == s.factor && b.predicate.admits(s))
            .map(|b| b.target)
            .collect()
    }

    /// Whether some bundle path from the start vertex reads `seq`.
    pub fn accept(&self, seq: &[FactorElement]) -> bool {
        if seq.iter().any(|s| self.spec.check_syllable(s).is_err()) {
            return false;
        }
        let mut cur = vec![self.start];
        for s in seq {
            let mut next: Vec<usize> = cur.iter().flat_map(|&v| self.successors(v, s)).collect();
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                return false;
            }
            cur = next;
        }
        true
    }

    /// Label sequences of all bundle paths of length at most `m` whose
    /// letters have factor word length at most `b`, ordered by length and
    /// then lexicographically. A sequence read along two paths appears twice.
    pub fn language(&self, m: usize, b: u64) -> Vec<Vec<FactorElement>> {
        let letters: Vec<Vec<FactorElement>> = (1..=self.spec.n_factors() as FactorId)
            .map(|j| factor_letters(&self.spec, j, b))
            .collect();
        let mut out = vec![Vec::new()];
        let mut frontier: Vec<(usize, Vec<FactorElement>)> = vec![(self.start, Vec::new())];
        for _ in 0..m {
            let mut next = Vec::new();
            for (v, seq) in &frontier {
                for bundle in self.outgoing(*v) {
                    for s in &letters[bundle.factor as usize - 1] {
                        if bundle.predicate.admits(s) {
                            let mut w = seq.clone();
                            w.push(s.clone());
                            next.push((bundle.target, w));
                        }
                    }
                }
            }
            out.extend(next.iter().map(|(_, w)| w.clone()));
            frontier = next;
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![self.start];
        seen[self.start] = true;
        while let Some(v) = stack.pop() {
            for b in self.outgoing(v) {
                if !seen[b.target] {
                    seen[b.target] = true;
                    stack.push(b.target);
                }
            }
        }
        seen
    }

    pub fn verify_structure(&self, m: usize, b: u64) -> StructureReport {
        let entering_start = self
            .bundles
            .iter()
            .enumerate()
            .filter(|(_, x)| x.target == self.start)
            .map(|(i, _)| i)
            .collect();
        let unreachable = self
            .reachable()
            .iter()
            .enumerate()
            .filter(|(_, &r)| !r)
            .map(|(i, _)| i)
            .collect();
        let mut report = StructureReport {
            m,
            b,
            entering_start,
            unreachable,
            non_geodesic: Vec::new(),
            non_geodesic_count: 0,
            accepted: 0,
            ball: ball_count(&self.spec, m, b),
            duplicates: Vec::new(),
            duplicate_count: 0,
            outside: 0,
            missing: 0,
        };
        let mut hit: HashSet<GroupElement> = HashSet::new();
        for seq in self.language(m, b) {
            report.accepted += 1;
            let g = self.spec.normalize(&seq).expect("letters were validated");
            if g.relative_len() != seq.len() {
                report.non_geodesic_count += 1;
                if report.non_geodesic.len() < 16 {
                    report.non_geodesic.push(seq.clone());
                }
            }
            let inside = g.relative_len() <= m
                && g.syllables().iter().all(|s| self.spec.syllable_len(s) <= b);
            if !inside {
                report.outside += 1;
            } else if !hit.insert(g.clone()) {
                report.duplicate_count += 1;
                if report.duplicates.len() < 16 {
                    report.duplicates.push(g);
                }
            }
        }
        report.missing = report.ball - hit.len() as u128;
        report
    }

    /// DOT rendering; vertices and bundles in index order.
    pub fn export_dot(&self) -> Result<String, AutomatonError> {
        if self.vertices.is_empty() {
            return Err(AutomatonError::Empty);
        }
        let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let mut label = format!("v{i}\\ntype {}", v.cone_type);
            if let Some(p) = &v.pset {
                label.push_str("\\nP = {");
                for (k, g) in p.iter().enumerate() {
                    if k > 0 {
                        label.push_str(", ");
                    }
                    let _ = write!(label, "{g}");
                }
                label.push('}');
            }
            let shape = if i == self.start {
                ", shape=doublecircle"
            } else {
                ""
            };
            let _ = writeln!(out, "  v{i} [label=\"{label}\"{shape}];");
        }
        for b in &self.bundles {
            let mut label = format!("H_{} \\\\ {{e}}", b.factor);
            let (note, list) = match &b.predicate {
                Predicate::NonIdentity => ("", None),
                Predicate::Only(l) => ("only", Some(l)),
                Predicate::Except(l) => ("except", Some(l)),
            };
            if let Some(list) = list {
                let _ = write!(label, "\\n{note} ");
                for (k, s) in list.iter().enumerate() {
                    if k > 0 {
                        label.push(' ');
                    }
                    let _ = write!(label, "{s}");
                }
            }
            let _ = writeln!(out, "  v{} -> v{} [label=\"{label}\"];", b.source, b.target);
        }
        out.push_str("}\n");
        Ok(out)
    }
}
