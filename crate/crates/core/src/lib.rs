//! Numerical toolkit for the inequality
//! `‖Θ∘(id - T)‖◇ ≤ (d/√2) ‖id - T‖◇` on quantum channels `T`, where `Θ`
//! is the transpose.
//!
//! - [`linalg`]: dense complex kernel (norms, eigen/SVD, `vec`, swap,
//!   partial trace and partial transpose).
//! - [`channels`]: Kraus channels, transfer matrices, Choi matrices, named
//!   families and Haar sampling.
//! - [`diamond`]: certified SDP and pure-state ascent for `‖·‖◇`.
//! - [`verify`]: theorem checks, lemma suite, equality-gap witnesses and the
//!   search for the best constant.

pub mod channels;
pub mod diamond;
mod error;
pub mod linalg;
pub mod verify;

pub use error::{Error, Result};
