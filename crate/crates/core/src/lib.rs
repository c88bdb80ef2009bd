//! Moment graphs of (affine) Weyl groups and their sheaf theory, computed
//! exactly over ℚ or a prime field.
//!
//! The crate builds Bruhat interval moment graphs, runs the Braden-MacPherson
//! construction degree by degree with exact linear algebra, computes
//! Kazhdan-Lusztig polynomials by the classical recursion, and cross-checks
//! the two against each other together with a number of structural
//! identities (graded ranks, smooth loci, flabbiness, structure algebra
//! stalks and costalks).
//!
//! Everything is degree-truncated: graded modules are stored as one
//! finite-dimensional coefficient space per degree together with the action
//! of the degree-one polynomial variables.

pub mod arith;
pub mod bmp;
pub mod klpoly;
pub mod momentgraph;
pub mod rootsys;
pub mod run;
pub mod sheafcore;
pub mod weyl;
