//! Numerical laboratory for the reflection-subordinate coupling of
//! subordinate Brownian motions and the total-variation decay bounds it
//! yields.

pub mod bernstein;
pub mod bounds;
pub mod coupling;
pub mod densities;
pub mod error;
pub mod harness;
pub mod jet;
pub mod quad;
pub mod special;
pub mod stats;
pub mod subordinators;

pub use bernstein::{BernsteinSpec, Family, SlopeAtZero};
pub use error::{LabError, Result};
