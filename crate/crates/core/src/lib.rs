//! Star bodies, test functions and numerical verification of affine
//! Hardy-Littlewood-Sobolev type inequalities in dimensions 1 to 3.

pub mod error;
pub mod functions;
pub mod geometry;
pub mod hls;
pub mod linalg;
pub mod quad;
pub mod report;
pub mod salpha;
pub mod specialfns;

pub use error::{Error, Result};
