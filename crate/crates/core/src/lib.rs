//! Exact computer algebra for the non-weight Virasoro modules
//! `M(V, Ω(λ_0, α_0)) ⊗ Ω(λ_1, α_1) ⊗ ⋯ ⊗ Ω(λ_m, α_m)`.
//!
//! Everything is computed over ℚ with arbitrary precision, so every check in
//! this crate is an exact identity rather than a tolerance test.

pub mod analysis;
pub mod arith;
pub mod certificate;
pub mod classify;
pub mod element;
pub mod error;
pub mod expsolve;
pub mod modules;
pub mod sampling;
pub mod vmodule;
pub mod wire;

pub use arith::{Monomial, MultiPoly, Scalar};
pub use element::TensorElement;
pub use error::{Error, Result};
pub use modules::{act_m, act_omega, act_tensor, check_bracket, LModule, OmegaParams, TensorDescriptor};
pub use vmodule::{validate_vdescriptor, VDescriptor};
pub use analysis::{
    check_invariance, closure, exhibit_reducible, filtration_check, generate_from, reduce_degree, Window,
};
pub use certificate::{replay, Certificate, Verdict};
pub use classify::{decide_irreducible, decide_iso, iso_intertwiner_evidence, IsoVerdict};
pub use expsolve::{extract_component, separate, separate_action};
pub use wire::parse_descriptor;
