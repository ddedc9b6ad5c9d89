//! Fidelity, decay-law fits, scaling exponents and phase-space observables.

pub mod fidelity;
pub mod fit;
pub mod husimi;
pub mod momentum;

pub use fidelity::{
    compute_fidelity_trace, fidelity, fidelity_time, fit_fidelity_decay, DecayFit, DecayModel, FidelityTrace, FitWindow,
};
pub use fit::{linear_fit, scaling_exponent, LineFit};
pub use husimi::{husimi, HusimiAccumulator, HusimiGrid};
pub use momentum::{momentum_distribution, participation_ratio, quantum_second_moment, quantum_second_moment_periodic};

/// Order-of-magnitude chaotic time scale `τ_χ ≈ 1 / (J √n_q)` of the
/// hardware Hamiltonian, in the same time units as `1/J`.
pub fn chaotic_time_scale(coupling: f64, n_qubits: usize) -> f64 {
    1.0 / (coupling * (n_qubits as f64).sqrt())
}
