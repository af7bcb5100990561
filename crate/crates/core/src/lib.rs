//! Truncated-Fock-space simulation of projective squeezing for
//! translation-symmetric bosonic codes (squeezed-cat and GKP).

pub mod circuit;
pub mod codes;
pub mod error;
pub mod fock;
pub mod kv;
pub mod noise;
pub mod projector;
pub mod quadrature;
pub mod sampler;
pub mod scenario;
pub mod wigner;

pub use error::{Error, Result};
pub use fock::{C64, FockOperator, FockState};
