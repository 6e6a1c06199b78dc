//! Geometry kernel for the universal cover of SL(2,R) in its projective
//! hyperboloid model: isometries, geodesics and distances, geodesic-ball and
//! prism volumes, and geodesic-ball packings under the prism tiling groups
//! `pq2₁`.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distance;
pub mod error;
pub mod geodesic;
pub mod mesh;
pub mod model;
pub mod ode;
pub mod packing;
pub mod quadrature;
pub mod tiling;
pub mod volume;

pub use error::{Error, Result};
