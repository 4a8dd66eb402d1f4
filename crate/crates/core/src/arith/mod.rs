//! Exact arithmetic: rationals, sparse polynomials, and linear algebra.

pub mod matrix;
pub mod poly;
pub mod scalar;

pub use matrix::{in_span, ExactMatrix, Rref, SparseSpan, SparseVec};
pub use poly::{Monomial, MultiPoly};
pub use scalar::Scalar;
