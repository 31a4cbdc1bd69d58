//! Random walks on free products of finitely generated abelian groups.
//!
//! The group model lives in [`freeprod`]. Convolution powers and return
//! probabilities are in [`measures`], Green functions and their spatial sums
//! in [`green`], first-return kernels to the factors in [`parabolic`], the
//! relative geodesic automaton in [`automaton`], and the Tauberian and
//! Ancona-type audits in [`tauberian`] and [`ancona`].
//!
//! The crate is `no_std` and only needs `alloc`. Work that can be spread over
//! threads goes through an [`Executor`]; the default [`Sequential`] runs
//! everything on the calling thread and gives bit-identical results to any
//! parallel implementation.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod ancona;
pub mod automaton;
pub mod engine;
pub mod freeprod;
pub mod green;
pub mod measures;
pub mod parabolic;
pub mod tauberian;

pub use engine::exec::{Executor, Sequential};
pub use freeprod::{
    FactorElement, FactorId, FactorKind, FactorSpec, GroupElement, GroupError, GroupSpec,
};
pub use measures::Measure;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
