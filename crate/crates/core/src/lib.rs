//! Simulation of hierarchical quantum states.
//!
//! The crate provides five building blocks on top of a small dense
//! complex linear algebra layer:
//!
//! - [`linalg`]: state vectors, operators, Kronecker products,
//!   mixed-radix multi-indices and a Jacobi hermitian eigensolver;
//! - [`tree`]: labeled trees of wave-function slots with validation,
//!   binding of parts into wholes, and a shape gate that refuses to
//!   compare states living on different tree shapes;
//! - [`density`]: micro/macro joint coefficients, density matrices,
//!   partial traces and macrolevel-conditioned observables;
//! - [`haar`]: the pairwise sum/difference codec that stores a
//!   register of `2^(N−1)` leaf states in as many independent vectors
//!   across `N` levels;
//! - [`repgroup`]: SU(2) irrep labels, Clebsch–Gordan series and
//!   product decompositions with multiplicities;
//! - [`repair`]: the three-level damage/descend/rebuild cascade over
//!   organism trees, recorded as replayable traces.
//!
//! [`codec`] gives every payload a canonical JSON form (fixed key
//! order, 17-significant-digit floats) with strict, unknown-field
//! rejecting parsing.

pub mod codec;
pub mod density;
pub mod error;
pub mod haar;
pub mod linalg;
pub mod repair;
pub mod repgroup;
pub mod tree;

pub use error::{Error, Result};
pub use linalg::{DEFAULT_TOLERANCE, MAX_DIM};
pub use num_complex::Complex64;
