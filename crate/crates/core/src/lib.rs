//! Exact toric, polyhedral and constructible-sheaf computations.

pub mod arrangement;
pub mod bside;
pub mod builtin;
pub mod ccc;
pub mod cone;
pub mod error;
pub mod fan;
pub mod hom;
pub mod lattice;
pub mod linalg;
pub mod micro;
pub mod models;
pub mod polyhedra;
pub mod schober;
pub mod sheaf;
pub mod skeleton;
pub mod torus;

pub use error::{Error, Result};
