use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::gate::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::state::QuantumRegister;

/// Apply a gate in place. Gates act on bits of the basis index and ignore the
/// register's basis tag.
pub fn apply_gate(reg: &mut QuantumRegister, gate: &Gate) -> Result<()> {
    let n = reg.n_qubits();
    for q in gate.qubits() {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: n });
        }
    }
    apply_unchecked(reg.amplitudes_mut(), gate);
    Ok(())
}

pub fn apply_circuit(reg: &mut QuantumRegister, circuit: &Circuit) -> Result<()> {
    if circuit.n_qubits() != reg.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: reg.n_qubits(),
            right: circuit.n_qubits(),
        });
    }
    let amps = reg.amplitudes_mut();
    for g in circuit.gates() {
        apply_unchecked(amps, g);
    }
    Ok(())
}

pub(crate) fn apply_unchecked(amps: &mut [Complex64], gate: &Gate) {
    match *gate {
        Gate::Hadamard(q) => hadamard(amps, q),
        Gate::Phase(q, phi) => {
            let ph = Complex64::from_polar(1.0, phi);
            let bit = 1usize << q;
            for_each_with_bits(amps.len(), bit, |i| amps[i] *= ph);
        }
        Gate::ControlledPhase(a, b, phi) => {
            let ph = Complex64::from_polar(1.0, phi);
            let mask = (1usize << a) | (1usize << b);
            for_each_with_bits(amps.len(), mask, |i| amps[i] *= ph);
        }
        Gate::Swap(a, b) => {
            let (ba, bb) = (1usize << a, 1usize << b);
            for i in 0..amps.len() {
                if i & ba != 0 && i & bb == 0 {
                    amps.swap(i, i ^ ba ^ bb);
                }
            }
        }
        Gate::GlobalPhase(phi) => {
            let ph = Complex64::from_polar(1.0, phi);
            amps.iter_mut().for_each(|x| *x *= ph);
        }
        Gate::CompensationRotation(_) => {}
    }
}

fn hadamard(amps: &mut [Complex64], q: usize) {
    let stride = 1usize << q;
    for base in (0..amps.len()).step_by(stride << 1) {
        for i in base..base + stride {
            let (x, y) = (amps[i], amps[i + stride]);
            amps[i] = (x + y) * FRAC_1_SQRT_2;
            amps[i + stride] = (x - y) * FRAC_1_SQRT_2;
        }
    }
}

/// Visit every index whose bits include all of `mask`.
#[inline]
fn for_each_with_bits(len: usize, mask: usize, mut f: impl FnMut(usize)) {
    // enumerate the complement bits and OR the mask back in
    let free = (len - 1) & !mask;
    let mut sub = free;
    loop {
        f(sub | mask);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
}

/// Dense column-major unitary of `circuit` (`u[col * dim + row]`).
pub fn dense_unitary(circuit: &Circuit) -> Vec<Complex64> {
    let dim = 1usize << circuit.n_qubits();
    let mut u = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let column = &mut u[col * dim..(col + 1) * dim];
        column[col] = Complex64::new(1.0, 0.0);
        for g in circuit.gates() {
            apply_unchecked(column, g);
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Basis;
    use rand::SeedableRng;

    #[test]
    fn hadamard_squared_is_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let orig = QuantumRegister::random(5, Basis::Momentum, &mut rng);
        for q in 0..5 {
            let mut reg = orig.clone();
            apply_gate(&mut reg, &Gate::Hadamard(q)).unwrap();
            apply_gate(&mut reg, &Gate::Hadamard(q)).unwrap();
            for (a, b) in reg.amplitudes().iter().zip(orig.amplitudes()) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn controlled_phase_hits_only_eleven() {
        let amps: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64 + 1.0, 0.0)).collect();
        let mut reg = QuantumRegister::from_amplitudes(3, amps.clone(), Basis::Momentum).unwrap();
        apply_gate(&mut reg, &Gate::ControlledPhase(0, 2, 0.7)).unwrap();
        let ph = Complex64::from_polar(1.0, 0.7);
        for (i, a) in reg.amplitudes().iter().enumerate() {
            let expected = if i & 0b101 == 0b101 { amps[i] * ph } else { amps[i] };
            assert_eq!(*a, expected);
        }
    }

    #[test]
    fn swap_exchanges_bits() {
        let mut reg = QuantumRegister::from_amplitudes(
            3,
            (0..8).map(|i| Complex64::new(i as f64, 0.0)).collect(),
            Basis::Momentum,
        )
        .unwrap();
        apply_gate(&mut reg, &Gate::Swap(0, 2)).unwrap();
        let got: Vec<f64> = reg.amplitudes().iter().map(|a| a.re).collect();
        assert_eq!(got, vec![0.0, 4.0, 2.0, 6.0, 1.0, 5.0, 3.0, 7.0]);
    }

    #[test]
    fn out_of_range_qubit() {
        let mut reg = QuantumRegister::momentum_eigenstate(2, 0).unwrap();
        assert!(matches!(
            apply_gate(&mut reg, &Gate::Hadamard(2)),
            Err(Error::QubitOutOfRange { index: 2, n_qubits: 2 })
        ));
    }

    #[test]
    fn norm_preserved_over_many_gates() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut reg = QuantumRegister::random(6, Basis::Momentum, &mut rng);
        for i in 0..10_000usize {
            let g = match i % 4 {
                0 => Gate::Hadamard(i % 6),
                1 => Gate::Phase(i % 6, 0.1 * i as f64),
                2 => Gate::ControlledPhase(i % 6, (i + 1) % 6, 0.37),
                _ => Gate::Swap(i % 6, (i + 2) % 6),
            };
            apply_gate(&mut reg, &g).unwrap();
        }
        assert!((reg.norm() - 1.0).abs() < 1e-12);
    }
}
