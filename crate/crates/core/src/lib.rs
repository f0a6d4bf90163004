//! Numerical geometry of asymptotically hyperbolic graphs over ℍⁿ.
//!
//! Radial graphing functions, their scalar and mean curvatures, the κ-mass
//! and its level-set representation, volume-growth stability estimates and
//! flat-norm bounds for the AdS-Schwarzschild family.

pub mod ads;
pub mod corpus;
pub mod curvature;
pub mod error;
pub mod flat;
pub mod hyperbolic;
pub mod mass;
pub mod ode;
pub mod profile;
pub mod quadrature;
pub mod registry;
pub mod stability;
pub mod star;
pub mod suites;

pub use error::{Error, Result};
