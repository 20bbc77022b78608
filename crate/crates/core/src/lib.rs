//! Exact arithmetic for Drinfeld cuspforms over A = F_q\[t\].
//!
//! Cuspforms of level Γ ⊆ SL₂(A) and weight k are realized combinatorially as
//! Γ-equivariant harmonic cocycles on the Bruhat-Tits tree of SL₂(K_∞), valued
//! in the dual V_k of homogeneous forms of degree k−2. The crate computes
//! Hecke operators T_Q, the U-operator at the distinguished prime t, diamond
//! operators and their character projectors as matrices over F_q\[t\], and
//! analyzes them t-adically: Newton polygons, slope multiplicities d(k,a),
//! elementary divisors, perturbation bounds, and congruences between
//! eigenvalue families in nearby weights.
//!
//! All arithmetic is exact. Eigenvalues are never represented in extensions
//! of F_q((t)); every statement about them flows through Newton polygons,
//! resultants, or truncated power series F_q\[\[t\]\]/t^P.
//!
//! Module layout mirrors the mathematical layers:
//!
//! * [`algebra`] — F_q, F_q\[t\], F_q\[\[t\]\]/t^P, polynomial matrices,
//!   characteristic polynomials, Newton polygons, Smith forms, resultants.
//! * [`tree`] — the Bruhat-Tits tree: vertex/edge normal forms, the GL₂(K)
//!   action, reduction to the standard half-line of SL₂(A).
//! * [`level`] — congruence subgroups Γ₁ᶿ(n, t^r), quotient data of the tree,
//!   Hecke coset representatives, diamond representatives.
//! * [`hecke`] — the weight-k module, cocycle extension, and Hecke/diamond/
//!   projector/weight-reduction matrices in the ordered Steinberg basis.
//! * [`slopes`] — slope tables, the explicit bounds C and D, elementary
//!   divisor and window checks, constancy and family-congruence verifiers.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

#[cfg(test)]
pub(crate) mod testutil;

pub mod algebra;
pub mod hecke;
pub mod level;
pub mod rng;
pub mod slopes;
pub mod tree;

pub use algebra::field::{FieldElem, FieldSpec};
pub use algebra::poly::{Poly, Val};
