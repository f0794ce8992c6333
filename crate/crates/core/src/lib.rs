//! Zeta-regularized determinants of the Friedrichs Laplacian on conical
//! surfaces: spindles, flat spheres with conical points, disks with a single
//! cone point, and hyperbolic spheres with cone points.

// `!(x > 0.0)` is deliberate: it rejects NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod barnes;
pub mod cone_terms;
pub mod determinants;
pub mod error;
pub mod extremal;
pub mod parallel;
pub mod quadrature;
pub mod special_fn;

pub use error::{Error, Result};
pub use parallel::Execution;
