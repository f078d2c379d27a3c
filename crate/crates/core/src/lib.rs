//! Computations with finite Abelian (affine) algebras.
//!
//! The crate discovers affine terms, realizes the correspondence between
//! subalgebras and congruences above them, factorizes morphisms out of powers
//! through small powers, produces replayable entailment certificates, and
//! checks at desk scale that the compatible relations of a bounded arity
//! dualize the algebra.
//!
//! Everything is exact and exhaustive; sizes are bounded by a [`Budget`].

pub mod affine;
pub mod algebra;
pub mod budget;
pub mod catalog;
pub mod congruence;
pub mod duality;
pub mod entailment;
pub mod error;
pub mod factorize;
pub mod hom;
pub mod homgroups;
pub mod relation;
pub mod report;
pub mod subcong;
pub mod subuniverse;
pub mod text;

pub use algebra::{Elem, FiniteAlgebra};
pub use budget::{Budget, DEFAULT_BUDGET};
pub use congruence::Congruence;
pub use error::{Error, Result};
pub use hom::Homomorphism;
pub use relation::Relation;
