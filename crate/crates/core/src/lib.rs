//! Adaptive mixed finite elements for convection-diffusion-reaction problems
//! on triangular meshes.

pub mod adapt;
pub mod error;
pub mod estimator;
pub mod linsolve;
pub mod mesh;
pub mod mixed;
pub mod problem;
pub mod quadrature;

pub use error::{Error, Result};
