//! Polynomial-method toolkit over finite fields: vanishing ideals with
//! multiplicity, Hilbert functions, degree closures and exact checkers for
//! the size bounds they imply.

pub mod bounds;
pub mod cli;
pub mod closure;
pub mod error;
pub mod field;
pub mod generators;
pub mod ideal;
pub mod linalg;
pub mod monomial;
pub mod poly;

pub use error::{Error, Result};
pub use field::{FieldSpec, FiniteField};
pub use ideal::{Limits, PointSet};
pub use monomial::{Exponent, Staircase};
pub use poly::{Point, Polynomial};
