//! Mapping-class-group orbits of branched G-covers of surfaces, encoded as
//! group tuples, together with stabilization maps and the C-reduced Schur
//! multiplier M(G)_C that classifies the stable orbits.

pub mod covers;
pub mod group;
pub mod homology;
pub mod linalg;
pub mod mcg;
pub mod schur;
pub mod stabilization;

pub use covers::{BranchData, BranchedTuple, Puncture, Sign};
pub use group::{ClassSet, Elem, FiniteGroup, GroupSpec};
pub use linalg::PresentedAbelianGroup;

/// Bumped whenever a change could alter cached results.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), "-", env!("CARGO_PKG_VERSION"));
