//! Lowering and optimization of SWAP gates on a directed cross-resonance
//! native gateset, with dense verification and noisy simulation.

pub mod bench;
pub mod circuit;
pub mod decomp;
pub mod device;
pub mod error;
mod linalg;
pub mod num;
pub mod noise;
pub mod passes;
pub mod unitary;

pub use circuit::{Angle, Circuit, Gate, Polarity};
pub use error::{Error, Result};

/// Double-precision operator.
pub type Unitary = unitary::Unitary<f64>;
/// Single-precision operator.
pub type UnitaryF32 = unitary::Unitary<f32>;
