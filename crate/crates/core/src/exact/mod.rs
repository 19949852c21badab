//! Exact arithmetic: ℚ(√D), towers over it, ball embeddings, reconstruction.

pub mod ball;
pub mod embed;
pub mod poly;
pub mod quad;
pub mod reconstruct;
pub mod tower;

pub use ball::Ball;
pub use embed::{approx_roots, certify_root, EmbeddingContext};
pub use poly::Poly;
pub use quad::{QuadElement, QuadField};
pub use reconstruct::{continued_fraction, pslq, rational_reconstruct};
pub use tower::{Tower, TowerElement};

use num_rational::BigRational;

/// Shorthand for the rational n/d.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
