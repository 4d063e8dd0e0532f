//! Exact arithmetic for Kloosterman sums over GF(2^r), the binary codes
//! attached to SL(n, q), and the Pless-identity recursion linking the two.
//!
//! Everything is computed with arbitrary-precision integers; no floating
//! point enters any reported value.

pub mod error;
pub mod field;

pub mod kloosterman;
pub mod moments;
pub mod poly;
pub mod sl_group;
pub mod tables;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use kloosterman::KloostermanTable;
pub use moments::MomentTable;
pub use sl_group::{GroupParams, TraceDistribution};
pub use weights::{DualWeights, WeightDistribution};
