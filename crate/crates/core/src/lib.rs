//! Open-system model of a neutral kaon entangled with its weak-decay
//! products, and the complementarity measures built on it.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices of dimension ≤ 9, a Jacobi
//!   eigensolver, PSD square roots, trace norms and partial traces.
//! - [`model`]: the kaon ⊗ pion Hilbert space, the dynamical map and the
//!   reduced states.
//! - [`channel`]: Kraus and Choi representations of the reduced kaon dynamics.
//! - [`measures`]: entropy, distinguishability, visibilities and the
//!   triality sum `V² + D² + S²`.
//! - [`verification`]: proper-time scans and the inequality / monotonicity
//!   checker.

pub mod channel;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod model;
pub mod verification;

pub use error::{Error, Result};
