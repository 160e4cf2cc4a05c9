//! Exact dense linear algebra over prime fields and seeded sampling.
//!
//! No floating point anywhere: every rank and kernel is computed by modular
//! Gaussian elimination.

mod field;
mod matrix;
mod rng;

pub use field::{is_prime, PrimeField, DEFAULT_PRIME};
pub use matrix::Matrix;
pub use rng::{derive_seed, RngState, RNG_ALGORITHM};
