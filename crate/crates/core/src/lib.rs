//! Curvature loci of 3-manifolds from nets of quadrics.
//!
//! The pipeline builds the 4×3 determinantal matrix of a net and a constraint
//! quadric, decomposes the variety of its 3×3 minors into planes and lines
//! with multiplicities, and reads off the locus type.

pub mod atlas;
pub mod classifier;
pub mod determinantal;
pub mod expr;
pub mod generic;
pub mod geometry;
pub mod linalg;
pub mod net;
pub mod poly;
pub mod projection;
pub mod report;
pub mod scalar;
pub mod solver;
pub mod surd;
pub mod upoly;

pub use net::{NetOfQuadrics, QuadraticTernaryForm};
pub use poly::{TernaryPoly, Var};
pub use scalar::Scalar;
pub use surd::Surd;
