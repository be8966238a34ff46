//! Exact computation and certification of Krull-Remak-Schmidt decompositions
//! of finite-dimensional right modules over structure-constant algebras over
//! prime fields.
//!
//! Everything is exact modular arithmetic: decompositions, locality verdicts,
//! idempotent sets and conjugating units come with witnesses whose defining
//! equations can be re-verified offline.

pub mod algebra;
pub mod corpus;
pub mod doc;
pub mod error;
pub mod field;
pub mod idempotent;
pub mod krs;
pub mod matrix;
pub mod module;
pub mod oracle;
pub mod poly;

pub use error::Error;
pub use field::Fp;
pub use matrix::Mat;
pub use poly::Poly;

/// Version string stamped into emitted certificates.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
