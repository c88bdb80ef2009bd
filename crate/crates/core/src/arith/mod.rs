//! Exact coefficient fields and degree-truncated graded linear algebra.
//!
//! All downstream computations reduce to linear algebra over an exact field
//! done one polynomial degree at a time. This module provides the fields
//! (ℚ with machine-word fast path, F_p), dense row reduction with kernel
//! extraction, echelon bases of subspaces, multivariate monomial bookkeeping
//! and the [`TruncatedModule`] type that stands in for finitely generated
//! graded modules over the symmetric algebra.

mod field;
mod mat;
mod module;
mod monomial;
mod poly;
mod rat;

pub use field::{Field, FieldElem, FieldSpec, PrimeField, Rationals};
pub use mat::{kernel_basis, solve_linear, solve_linear_elems, EchelonBasis, LinearSolution, Mat};
pub use module::{minimal_generator_degrees, span_module, GenReport, TruncatedModule};
pub use monomial::PolyRing;
pub use poly::{GradedPoly, QPoly, VPoly};
pub use rat::Rat;

use std::fmt;

/// Errors from field construction and linear algebra entry points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// Scalars from different fields were mixed in one computation.
    MixedFields,
    /// The modulus of a prime field is not prime (or out of range).
    NotPrime(u64),
    /// A free module generator degree exceeds the truncation bound.
    GenDegreeAboveBound { degree: usize, bound: usize },
    /// Matrix/vector shapes do not match.
    DimensionMismatch,
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::MixedFields => write!(f, "mixed-field inputs"),
            ArithError::NotPrime(p) => write!(f, "{p} is not a prime in the supported range"),
            ArithError::GenDegreeAboveBound { degree, bound } => {
                write!(f, "generator degree {degree} exceeds truncation bound {bound}")
            }
            ArithError::DimensionMismatch => write!(f, "dimension mismatch"),
        }
    }
}

impl std::error::Error for ArithError {}
