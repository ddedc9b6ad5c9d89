use std::f64::consts::PI;

use super::gate::{reduce_angle, Circuit, Gate};
use crate::state::SawtoothParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QftDirection {
    /// `|x⟩ → N^{-1/2} Σ_y e^{2πixy/N} |rev(y)⟩`
    Forward,
    /// Exact adjoint of `Forward`.
    Backward,
}

/// Hadamards and controlled phases `π/2^d`; no swap network. The output of the
/// forward transform is bit-reversed: qubit `j` carries bit `n_q − 1 − j` of
/// the frequency index.
pub fn build_qft(n_qubits: usize, direction: QftDirection) -> Circuit {
    let mut c = Circuit::new(n_qubits);
    for target in (0..n_qubits).rev() {
        c.push(Gate::Hadamard(target)).expect("qubit in range");
        for control in (0..target).rev() {
            let angle = PI / 2f64.powi((target - control) as i32);
            c.push(Gate::ControlledPhase(control, target, angle))
                .expect("qubit in range");
        }
    }
    match direction {
        QftDirection::Forward => c,
        QftDirection::Backward => c.adjoint(),
    }
}

/// `diag exp(i a (x − shift)²)` over basis index `x`.
pub fn build_quadratic_phase(n_qubits: usize, a: f64, shift: i64) -> Circuit {
    let wires: Vec<usize> = (0..n_qubits).collect();
    build_quadratic_phase_on(n_qubits, a, shift, &wires)
}

/// Same as [`build_quadratic_phase`] with bit `j` of `x` read from qubit
/// `wires[j]`.
///
/// With `x = Σ_j 2^j b_j`,
/// `a(x − s)² = Σ_j a(4^j − 2s·2^j) b_j + Σ_{j<j'} 2a·2^{j+j'} b_j b_j' + a s²`,
/// so the decomposition is exact: `n_q` phases, `n_q(n_q−1)/2` controlled
/// phases and one global phase.
pub fn build_quadratic_phase_on(n_qubits: usize, a: f64, shift: i64, wires: &[usize]) -> Circuit {
    assert_eq!(wires.len(), n_qubits, "one wire per bit");
    let mut c = Circuit::new(n_qubits);
    let s = shift as f64;
    for (j, &q) in wires.iter().enumerate() {
        let w = 2f64.powi(j as i32);
        let angle = a * (w * w - 2.0 * s * w);
        c.push(Gate::Phase(q, reduce_angle(angle))).expect("qubit in range");
    }
    for j in 0..n_qubits {
        for jj in j + 1..n_qubits {
            let angle = 2.0 * a * 2f64.powi((j + jj) as i32);
            c.push(Gate::ControlledPhase(wires[j], wires[jj], reduce_angle(angle)))
                .expect("qubit in range");
        }
    }
    c.push(Gate::GlobalPhase(reduce_angle(a * s * s))).expect("no qubits");
    c
}

/// Nominal per-iteration gate budget `3n_q² + n_q`.
///
/// That figure charges each diagonal stage `n_q²` gates and each QFT
/// `n_q(n_q+1)/2`. The exact binary-expansion stages used here need only
/// `n_q(n_q+1)/2` each, so [`build_map_circuit`] comes in at `2n_q² + 2n_q`,
/// which never exceeds the budget.
pub fn map_gate_budget(n_qubits: usize) -> usize {
    3 * n_qubits * n_qubits + n_qubits
}

/// One map iteration `U = U_T U_k` as a gate list.
///
/// The `(−1)^l` factor between the angle representation and a plain DFT
/// appears on both sides of the kick and cancels, so no correction gates are
/// emitted.
pub fn build_map_circuit(params: &SawtoothParams) -> Circuit {
    let n = params.n_qubits;
    let dim = params.dim() as f64;
    let half = (params.dim() / 2) as i64;
    let theta_step = 2.0 * PI / dim;

    let mut c = build_qft(n, QftDirection::Forward);

    let reversed: Vec<usize> = (0..n).rev().collect();
    let kick_a = 0.5 * params.kick() * theta_step * theta_step;
    c.extend(&build_quadratic_phase_on(n, kick_a, half, &reversed))
        .expect("same width");

    c.extend(&build_qft(n, QftDirection::Backward)).expect("same width");

    let rotation_a = -0.5 * params.period();
    c.extend(&build_quadratic_phase(n, rotation_a, half))
        .expect("same width");
    c
}
