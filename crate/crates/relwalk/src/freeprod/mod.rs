//! Free products `H_1 * ... * H_N` of groups `Z^d` and `Z/m`.
//!
//! Elements are stored in syllable normal form. The generating set is the
//! union of the standard generators of the factors and their inverses, so the
//! word length of an element is the sum of the factor word lengths of its
//! syllables (`l1` norm on `Z^d`, `min(k, m - k)` on `Z/m`). The relative
//! length counts syllables.

mod element;
mod enumerate;
mod paths;

pub use element::{FactorElement, FactorId, FactorKind, FactorSpec, GroupElement, GroupSpec};
pub use enumerate::{ball_count, factor_letters, sphere_counts, BallIter};
pub use paths::{
    components, extension_element, lift_path, relative_geodesic, ComponentRecord, LiftedPath,
    PathVertices, RelativePath,
};

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("unknown factor id {0}")]
    UnknownFactor(FactorId),
    #[error("syllable {0} does not match the declared factor")]
    Mismatch(String),
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("cannot parse element `{0}`")]
    Parse(String),
    #[error("operation needs at least two factors")]
    TooFewFactors,
}
