//! Bent Boolean functions from bent squares.
//!
//! The crate builds bent functions in `n` variables out of quadruples of
//! 2-regular binary matrices whose XOR signatures match, verifies every one
//! of them with a Walsh–Hadamard transform, and evaluates the resulting
//! counting lower bound `b_n >= 32 m^4 / s^4` against exhaustive oracles.

pub mod bentsquare;
pub mod boolfn;
pub mod bounds;
pub mod construct;
mod error;
pub mod tworegular;

pub use error::{Error, Result};
