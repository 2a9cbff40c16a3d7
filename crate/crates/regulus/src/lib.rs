//! Exact symbolic engine for commutative regular algebras and their matrix
//! algebras.
//!
//! The carrier is a finite product of rational function fields over the
//! Gaussian rationals, one factor per atom of a measured Boolean algebra of
//! idempotents. Every element has a support idempotent and a pseudo-inverse,
//! which is what makes the ring regular and drives all constructions here:
//!
//! - [`lattice`]: the finite measured Boolean algebra of idempotents.
//! - [`algebra`]: elements, support, pseudo-inverse, masking by idempotents,
//!   membership idempotents of generated subalgebras, and the rank test for
//!   independence of families.
//! - [`derivation`]: derivations in coefficient form, prescribed values on
//!   generators, and extension by a value at a weakly transcendental point.
//! - [`matrix`]: square matrices over the algebra, derivations split into an
//!   inner and an entrywise central part, decomposition of an arbitrary
//!   derivation into that form, and commutant computations.
//! - [`twolocal`]: 2-local maps given by value and witness assignments; the
//!   homogeneous non-additive example on the commutative algebra, and the
//!   staged certification that every 2-local derivation on a matrix algebra
//!   of dimension at least two is a derivation.
//! - [`selftest`]: the named acceptance checks and their runner.
//!
//! All arithmetic is exact; nothing in the crate rounds or approximates.

pub mod algebra;
pub mod derivation;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod ratfunc;
pub mod sample;
pub mod scalar;
pub mod selftest;
pub mod twolocal;

pub use algebra::{jacobian_independent, Algebra, RegularElement};
pub use derivation::{extend_with_value, AbelianDerivation};
pub use error::{EngineError, PipelineStage, Result};
pub use lattice::{AtomSpace, Idempotent, MAX_ATOMS};
pub use matrix::{
    commutant_basis, commutator, decompose, EvaluationTable, MatrixDerivation, MatrixElement,
};
pub use poly::{VarId, VarSet};
pub use ratfunc::RationalFunction;
pub use scalar::{rational, Rational, Scalar};
pub use twolocal::{
    build_counterexample, AbelianTwoLocal, AdditivityReport, LinearizeConfig, MatrixTwoLocal,
};
