//! Volumes of tubes about geodesics and curves in model Riemannian manifolds.
//!
//! Curvature tensors are stored with components `R_{ijkl}` normalized so that
//! `R_{ijij}` is the sectional curvature of the plane `e_i ^ e_j`.

pub mod curvature;
pub mod curve_tube;
pub mod damek_ricci;
pub mod error;
pub mod linalg;
pub mod quadrature;
pub mod samples;
pub mod special;
pub mod symmetric_tube;

pub use curvature::{JacobiOperator, RiemannCurvature};
pub use error::{Error, Result};
