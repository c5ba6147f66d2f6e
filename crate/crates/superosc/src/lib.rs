//! Finite-dimensional matrix representations of classical and q-deformed
//! oscillator (super)algebras, superunitary intertwining transformations on
//! Grassmann-doubled spaces, and numerical verification of every algebra
//! relation as a matrix identity.
//!
//! Layout:
//! - [`expr`]: noncommutative operator-expression engine (parse, adjoint,
//!   scale/substitute, evaluate against a representation).
//! - [`rep`]: Fock-space representation builders (bosons, fermions,
//!   q-deformations, root-of-unity, tensor pairs, two modes).
//! - [`superalg`]: relation sets, truncation-aware verification, graded
//!   brackets, and the q-Jacobi identity check.
//! - [`registry`]: the named catalog of builtin algebras behind a common
//!   trait, selected at runtime.
//! - [`grassmann`]: the nilpotent variable on the doubled space and
//!   superunitary conjugation.
//! - [`intertwine`]: intertwiner construction pipelines and oracles.
//! - [`sampling`]: seeded generators for reproducible randomized checks.

pub mod error;
pub mod expr;
pub mod grassmann;
pub mod intertwine;
pub mod matrix;
pub mod registry;
pub mod rep;
pub mod sampling;
pub mod superalg;

pub use error::{Error, Result};
