//! Gradient estimates for `-Delta_p u + |grad u|^q = 0` on model manifolds.
//!
//! The crate instantiates the barrier machinery behind the global gradient
//! bound `|grad u| <= c_{n,p,q} B^{1/(q+1-p)}` on spaces of constant curvature
//! `-B^2`, derives every constant of the argument explicitly, produces radial
//! and horospherical test solutions, and checks the resulting estimates. All
//! numerics are generic over [`Scalar`]; the `*64` aliases fix `f64`.

// Negated comparisons such as `!(x > 0.0)` deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod error;
pub mod estimates;
pub mod geometry;
pub mod proof_constants;
pub mod radial_solver;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ModelManifold64 = geometry::ModelManifold<f64>;
pub type Exponents64 = proof_constants::Exponents<f64>;
pub type ProofConstants64 = proof_constants::ProofConstants<f64>;
pub type BarrierParams64 = barrier::BarrierParams<f64>;
pub type RadialField64 = radial_solver::RadialField<f64>;
