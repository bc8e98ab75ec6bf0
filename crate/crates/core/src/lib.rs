//! Construction and verification of triorthogonal evaluation codes over
//! GF(2^2m), the quantum CSS codes they induce (with a transversal CCZ gate),
//! and the exact state-reduction circuits that convert |CCZ> states between
//! qudit dimensions.
//!
//! The crate is organized bottom-up:
//!
//! - [`gf`]: GF(2^m) arithmetic, subfield embeddings, normal bases.
//! - [`poly`] / [`func_field`]: polynomials, divisors, Riemann-Roch spaces
//!   and the logarithmic differential on the rational function field.
//! - [`code`]: generator matrices, the base evaluation code, duals,
//!   triorthogonality and distance certificates.
//! - [`tower`]: parameter calculus for the lifted code family, overhead
//!   optimization and asymptotic bound reports.
//! - [`css`]: the standard-form split and the derived CSS code, the
//!   transversal-CCZ phase check and heuristic distance search.
//! - [`reduce`]: dense qudit statevector simulation of the |CCZ> reduction
//!   protocol and the gate-budget planner.

pub mod code;
pub mod css;
pub mod func_field;
pub mod gf;
pub mod poly;
pub mod reduce;
pub mod tower;

pub use code::{construct_base_code, BaseCode, LinearCode};
pub use gf::{make_field, FieldElem, FieldSpec, QuadraticExtension};
