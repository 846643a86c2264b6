//! Conforming mixed finite elements for linear elasticity in the Hellinger–Reissner
//! formulation on rectangular meshes.
//!
//! Stresses are symmetric and `H(div)`-conforming: the normal components come from
//! an enriched BDFM space, the shear component from the serendipity space. The
//! displacement is discontinuous. A reduced family replaces interior bubbles by
//! Airy-function enrichments.
//!
//! The crate covers reference-element construction in 2D and 3D, global assembly
//! and sparse direct solves on uniform meshes of the unit square, inf-sup
//! diagnostics, and convergence studies on manufactured solutions.

pub mod assembly;
pub mod config;
pub mod error;
pub mod linalg;
pub mod mesh;
pub mod mpoly;
pub mod polys;
pub mod refelem;
pub mod solve;
pub mod stability;
pub mod study;

pub use error::{Error, Result};
pub use refelem::Family;
