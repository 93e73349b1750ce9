//! Numerical verification of Hardy-type inequalities with weights on
//! one-dimensional reductions of model manifolds.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod eigen;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod grids;
pub mod optimize;
pub mod suite;
pub mod weights;

pub use error::{Error, Result};
