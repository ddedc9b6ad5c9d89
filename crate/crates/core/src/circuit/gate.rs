use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Hadamard(usize),
    /// `diag(1, e^{iφ})` on one qubit.
    Phase(usize, f64),
    /// `e^{iφ}` on `|11⟩`; symmetric in its operands.
    ControlledPhase(usize, usize, f64),
    Swap(usize, usize),
    /// Bookkeeping phase on the whole register; takes no hardware time.
    GlobalPhase(f64),
    /// Rotation cancelling the mean level spacing `Δ0`. With `Δ0` removed
    /// exactly this is the identity; it is kept so dumps can mark where the
    /// hardware would apply it.
    CompensationRotation(usize),
}

impl Gate {
    /// Qubits acted upon.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Hadamard(q) | Gate::Phase(q, _) | Gate::CompensationRotation(q) => vec![q],
            Gate::ControlledPhase(a, b, _) | Gate::Swap(a, b) => vec![a, b],
            Gate::GlobalPhase(_) => Vec::new(),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::ControlledPhase(..) | Gate::Swap(..))
    }

    /// Whether the gate occupies one hardware time slot.
    pub fn takes_time(&self) -> bool {
        !matches!(self, Gate::GlobalPhase(_))
    }

    pub fn adjoint(&self) -> Gate {
        match *self {
            Gate::Phase(q, a) => Gate::Phase(q, -a),
            Gate::ControlledPhase(a, b, phi) => Gate::ControlledPhase(a, b, -phi),
            Gate::GlobalPhase(a) => Gate::GlobalPhase(-a),
            g => g,
        }
    }
}

/// Reduce an angle into `(−π, π]`.
pub(crate) fn reduce_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub hadamard: usize,
    pub phase: usize,
    pub controlled_phase: usize,
    pub swap: usize,
    pub global_phase: usize,
    pub compensation: usize,
}

impl GateCounts {
    pub fn single_qubit(&self) -> usize {
        self.hadamard + self.phase + self.compensation
    }

    pub fn two_qubit(&self) -> usize {
        self.controlled_phase + self.swap
    }

    /// Gates that cost a hardware time slot (global phases excluded).
    pub fn timed(&self) -> usize {
        self.single_qubit() + self.two_qubit()
    }

    fn record(&mut self, gate: &Gate) {
        match gate {
            Gate::Hadamard(_) => self.hadamard += 1,
            Gate::Phase(..) => self.phase += 1,
            Gate::ControlledPhase(..) => self.controlled_phase += 1,
            Gate::Swap(..) => self.swap += 1,
            Gate::GlobalPhase(_) => self.global_phase += 1,
            Gate::CompensationRotation(_) => self.compensation += 1,
        }
    }
}

/// Ordered gate list on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    counts: GateCounts,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            counts: GateCounts::default(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn counts(&self) -> GateCounts {
        self.counts
    }

    /// Number of timed gates (everything but global phases).
    pub fn gate_count(&self) -> usize {
        self.counts.timed()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        for q in gate.qubits() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        if let Gate::ControlledPhase(a, b, _) | Gate::Swap(a, b) = gate {
            if a == b {
                return Err(Error::invalid("gate", format!("two-qubit gate on repeated qubit {a}")));
            }
        }
        self.counts.record(&gate);
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        for g in &other.gates {
            self.counts.record(g);
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn adjoint(&self) -> Circuit {
        let mut out = Circuit::new(self.n_qubits);
        for g in self.gates.iter().rev() {
            out.counts.record(g);
            out.gates.push(g.adjoint());
        }
        out
    }

    /// Recount from the gate list.
    pub fn recount(&self) -> GateCounts {
        let mut c = GateCounts::default();
        self.gates.iter().for_each(|g| c.record(g));
        c
    }
}

impl Circuit {
    pub fn from_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Circuit> {
        let mut c = Circuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_validates_indices() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::Hadamard(2)).is_err());
        assert!(c.push(Gate::ControlledPhase(1, 1, 0.3)).is_err());
        c.push(Gate::ControlledPhase(0, 1, 0.3)).unwrap();
        c.push(Gate::GlobalPhase(1.0)).unwrap();
        assert_eq!(c.gate_count(), 1);
        assert_eq!(c.counts(), c.recount());
    }

    #[test]
    fn angle_reduction() {
        assert!((reduce_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((reduce_angle(-PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }
}
