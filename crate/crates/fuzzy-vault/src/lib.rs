//! Unlinkable improved fuzzy vault over GF(2^w) with a training-free,
//! rank-based feature-type transformation and an evaluation harness.
//!
//! The pipeline turns a fixed-length real-valued embedding into an integer
//! feature set (quantization, binarization, set mapping), binds a secret
//! polynomial to that set (`vault`), and recovers the secret from a noisy
//! probe via Guruswami-Sudan list decoding (`listdecode`).

pub mod eval;
pub mod feature_transform;
pub mod galois;
pub mod listdecode;
pub mod polyring;
pub mod vault;

mod drbg;
mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
