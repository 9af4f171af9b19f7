//! Rank-2 Lie algebras (A2, B2, G2), their fundamental representations, the
//! determinant identities of their group elements, and numerical certification
//! of the graded Toda-type systems solved by `K = M+ M-`.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod grading;
pub mod identities;
pub mod jet;
pub mod matrix;
pub mod rng;
pub mod scalar;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
