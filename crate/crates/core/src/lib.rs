//! Simulation of the quantum sawtooth map at three levels of realism: the
//! exact split-operator engine, the ideal gate circuit, and the circuit
//! running on hardware with static imperfections or noisy gates. Classical
//! ensembles and phase-space analysis tools complete the picture.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod circuit;
pub mod classical;
pub mod error;
pub mod grid;
pub mod hardware;
pub mod harness;
pub mod rng;
pub mod state;

pub use error::{Error, Result};
pub use state::{Basis, QuantumRegister, SawtoothParams};
