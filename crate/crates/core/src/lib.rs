//! Random Bernoulli polynomial systems: exact directional resultants,
//! numerical solving, and equidistribution statistics of their zeros on the
//! unit torus.

pub mod error;
pub mod experiment;
pub mod geometry;
pub mod poly;
pub mod resultant;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, SummaryTable, TrialRecord};
pub use geometry::{LatticePoint, LatticePolytope};
pub use poly::{ComplexPoint, IntPolynomial, PolySystem};
