//! Exact certificate search for nef and ample classes on blow-ups of the
//! projective plane at general points.
//!
//! Classes live in the hyperbolic lattice `H_k` ([`lattice`]). Positivity is
//! established by certificates ([`certificate`]) built from base families
//! ([`base`]), the gluing operation ([`gluing`]) and the Cremona action
//! ([`cremona`]). The [`prover`] searches for such certificates and
//! [`pell`] generates continued-fraction targets and remainder bounds.

pub mod base;
pub mod bounds;
pub mod certificate;
pub mod cremona;
pub mod gluing;
pub mod lattice;
pub mod pell;
pub mod prover;
mod scalar;

pub use lattice::{ClassVector, PositivityKind, Rational};
