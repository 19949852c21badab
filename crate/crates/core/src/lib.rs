//! Exact construction and verification of SIC fiducial vectors in dimensions
//! d = n² + 3 (mainly d = 4p) from Stark-unit minimal polynomials.
//!
//! The crate is organised bottom-up:
//!
//! - [`exact`]: ℚ(√D), towers of number fields over it, complex ball embeddings
//!   and reconstruction of exact elements from numerical values.
//! - [`galois`]: automorphisms of towers, orbits and exact root lifting.
//! - [`heisenberg`]: Weyl–Heisenberg and Clifford operators as monomial matrices.
//! - [`towers`]: the dimension towers d_ℓ(D) and shifted Chebyshev polynomials.
//! - [`stark_io`]: dataset ingestion, τ-conjugation and quadratic-substitution
//!   factorisation.
//! - [`ansatz`]: fiducial assembly, sign determination and the parameter search.
//! - [`verify`]: exact and numerical SIC verification.
//! - [`cli`]: the `sicstark` command line.

pub mod ansatz;
pub mod cli;
pub mod exact;
pub mod galois;
pub mod heisenberg;
pub mod stark_io;
pub mod towers;
pub mod verify;

mod error;

pub use error::{Error, Result};
