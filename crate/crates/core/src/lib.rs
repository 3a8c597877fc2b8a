//! Exact computer algebra for uni-trivalent diagrams: formal Gaussian integration,
//! negative-dimensional integration, and the identities relating them.

pub mod cli;
pub mod diagram;
pub mod error;
pub mod gluing;
pub mod integrals;
pub mod linalg;
pub mod random;
pub mod series;

pub use diagram::{Color, Diagram, DiagramSum, Flavor, Truncation};
pub use error::{Error, Result};
pub use linalg::{QuadraticForm, Rational};
