//! Numerical Finsler geometry on truncated Taylor jets.
//!
//! A metric is written once as a function of jets in the `2n` variables
//! `(x, y)`. Every tensor the curvature pipeline needs, from the
//! fundamental tensor to the Einstein residual, is then read off jet
//! coefficients at a sampled point, with no symbolic algebra and no
//! finite-difference step in the loop.
//!
//! ```
//! use finsler::prelude::*;
//!
//! let sphere = make_riemannian(RoundSphere2);
//! let p = PointState::new(vec![1.0, 0.3], vec![0.6, -0.8]).unwrap();
//! let ric = ricci_scalar_einstein(&sphere, &p).unwrap();
//! assert!((ric.scal - 2.0).abs() < 1e-8);
//! assert!(ric.einstein_residual < 1e-8);
//! ```
//!
//! The [`oracle`] module recomputes Riemannian curvature with plain finite
//! differences and serves as the independent check on the jet path.

// `!(a > b)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal;
pub mod curvature;
pub mod error;
pub mod jets;
pub mod metric;
pub mod oracle;
pub mod zoo;

pub use error::{GeometryError, JetError, Result};
pub use jets::{Jet, MultiIndex, Real};
pub use metric::{Domain, FinslerMetric, MetricField, PointState, SamplePlan, ScalarField};

/// Everything needed for typical use.
pub mod prelude {
    pub use crate::conformal::*;
    pub use crate::curvature::*;
    pub use crate::error::{GeometryError, JetError, Result};
    pub use crate::jets::*;
    pub use crate::metric::*;
    pub use crate::oracle::*;
    pub use crate::zoo::*;
}
