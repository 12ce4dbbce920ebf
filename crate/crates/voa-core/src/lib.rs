//! Exact-arithmetic engine for lattice vertex operator algebras.
//!
//! Everything is computed over the rationals (or Gaussian rationals where
//! fourth roots of unity appear); there is no floating point anywhere.
//! The main pipeline, for an even positive-definite lattice `L`:
//!
//! * [`lattice`] — the Gram form, cosets of `2L`, the sublattice `R`,
//!   short-vector enumeration and the isometry group `O(L)`.
//! * [`extension`] — the canonical central extension `L̂` with its
//!   2-cocycle, the involution `θ`, the subgroup `K`, the finite quotient
//!   `L̂/K`, its central characters and the irreducible modules `T_χ`.
//! * [`fock`] — graded Fock states with integer (untwisted) or
//!   half-integer (twisted) modes, Schur polynomials and the `Δ_z`
//!   correction coefficients.
//! * [`voa`] — untwisted vertex-operator modes, Virasoro operators and
//!   the weight-one Lie algebra.
//! * [`twisted`] — θ-twisted vertex operators on `M_{Z+1/2}(1) ⊗ T_χ` and
//!   top-level matrix evaluation.
//! * [`zhu`] — the twisted Zhu algebra `A_θ(V_L)`: the `∘`/`∗` products,
//!   the rewrite system that reduces every state to the span of coset
//!   representatives, structure constants, the group-algebra isomorphism
//!   and the θ-rationality certificate.
//! * [`aut`] — the automorphism-group skeleton: `Hom(L, Z/2Z)`, lifted
//!   isometries, and exhaustive automorphism verification on truncations.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the CLI
//! live in the companion `voa-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod aut;
pub mod extension;
pub mod fock;
pub mod lattice;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod twisted;
pub mod voa;
pub mod zhu;

pub use extension::Extension;
pub use lattice::GramMatrix;
pub use scalar::{GaussRat, Rat};
