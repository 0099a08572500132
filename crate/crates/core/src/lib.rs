//! Geometry of pseudoholomorphic curves in the nearly Kähler CP³.
//!
//! The crate generates rational curves from Weierstrass data, evaluates the
//! first-order invariants I₁ and I₂ and the torsion residual along them,
//! classifies curves as vertical, horizontal or null-torsion, realizes the
//! partner correspondence with holomorphic contact integrals, and projects
//! curves through the twistor fibration to minimal surfaces in S⁴. All
//! verifiable identities (structure equations, contact pullbacks, partner
//! roundtrips, divisor degrees, minimality) are checked by residuals at
//! explicit tolerances.

pub(crate) mod bipoly;
pub mod config;
pub mod curve;
pub mod divisor;
pub mod error;
pub mod grid;
pub mod quat;
pub mod ratfun;
pub mod s4;
pub mod twistor;
pub mod wjet;

pub use error::{Error, Result};

/// Global epsilon for tolerance-based algebraic equality.
pub const EPS: f64 = 1e-12;
