//! Constant-mean-curvature surfaces of revolution in the three space forms:
//! construction from the governing meridian ODE, free-boundary shooting
//! against geodesic balls, spherical caps, and numerical verification of
//! the pinching inequality, its determinant identity, boundary convexity
//! and the Gauss-Bonnet balance.
//!
//! Everything is pure and deterministic: all types are immutable values and
//! every operation is a function of its arguments, safe to call from any
//! number of threads.

pub mod delaunay;
pub mod error;
pub mod export;
pub mod freeboundary;
pub mod oracle;
pub mod pinch;
pub mod rotation;
pub mod spaceform;

pub use error::{CmcError, Result};
pub use spaceform::{AmbientPoint, Model, SpaceForm, TangentVec};
