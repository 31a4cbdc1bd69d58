//! Relative geodesic automaton on a free product.
//!
//! Cone types are found from `rho_C` fingerprints over a truncated ball and
//! merged by their reduced extension sets. `G_0` has one vertex per type and
//! one bundle per (source, target, factor); `G_1` refines it with the
//! lexicographic P-sets. Edge sets are infinite for `Z^d` factors, so each
//! bundle carries a predicate on the factor elements it admits.

mod cone;
mod graph;
mod pset;

pub use cone::{build_g0, cone_types, default_c, ConeType, ConeTypes};
pub use graph::{AutomatonGraph, Bundle, Predicate, StructureReport, Vertex};
pub use pset::{p_step, refine_g1, trace_psets, FreeProductLetters, LetterSystem};

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AutomatonError {
    #[error("invalid automaton parameter: {0}")]
    Invalid(String),
    #[error("automaton has no vertices")]
    Empty,
}
