//! Iterated Laplace-Beltrami operators on radial models, doubly warped
//! products and semi-Euclidean space, with an Almansi-type classifier and a
//! finite-difference oracle for cross-checking every symbolic result.

pub mod almansi;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod operators;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
