//! Polytope arithmetic, mixed volumes and checkers for Rogers–Shephard type
//! inequalities, in exact rational or floating arithmetic.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod functional;
pub mod mixed;
pub mod planar;
pub mod report;
pub mod rs_bodies;
pub mod scalar;
pub mod simplex;

pub use error::{GeomError, Result};
pub use geometry::{HPolytope, VPolytope};
pub use scalar::{Mode, Rational, Scalar};
