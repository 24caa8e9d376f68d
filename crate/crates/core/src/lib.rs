//! Isoperimetric, spectral and concentration constants of convex bodies and
//! log-concave measures in dimensions 1 to 3.
//!
//! The four constants computed here are the Cheeger constant (`D_Che`), the
//! Poincaré constant (`D_Poin`), the exponential concentration constant
//! (`D_Exp`) and the first-moment concentration constant (`D_FM`), together
//! with the classical inequalities that relate them.
//!
//! Estimators over a finite family of test functions are one-sided: they
//! return upper bounds on infima taken over all Lipschitz functions.

// `!(x > 0.0)` is how NaN gets rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod concentration;
pub mod constants;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod measures;
pub mod profile;
pub mod report;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};

/// A computed value together with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, err: 0.0 }
    }

    pub fn new(value: f64, err: f64) -> Self {
        Estimate { value, err }
    }
}
