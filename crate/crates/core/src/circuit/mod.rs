//! Gate-level realization of one map iteration.
//!
//! Qubit `j` holds bit `j` (LSB = 0) of the basis index. The map circuit is
//! `QFT → kick phase → QFT† → rotation phase`, with the QFT output left in
//! bit-reversed order and the kick stage wired accordingly.

mod apply;
mod build;
mod dump;
mod gate;
mod layout;

pub(crate) use apply::apply_unchecked as apply_gate_unchecked;
pub use apply::{apply_circuit, apply_gate, dense_unitary};
pub use build::{
    build_map_circuit, build_qft, build_quadratic_phase, build_quadratic_phase_on, map_gate_budget, QftDirection,
};
pub use dump::{format_hex_float, parse_hex_float};
pub use gate::{Circuit, Gate, GateCounts};
pub use layout::{route, LatticeLayout, RoutingReport, Site};
