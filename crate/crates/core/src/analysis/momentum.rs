use crate::error::Result;
use crate::state::{Basis, QuantumRegister};

/// `|c_m|²` over the momentum basis.
pub fn momentum_distribution(reg: &QuantumRegister) -> Result<Vec<f64>> {
    reg.expect_basis(Basis::Momentum)?;
    Ok(reg.amplitudes().iter().map(|a| a.norm_sqr()).collect())
}

/// `Σ_m |c_m|² (nT − p0)²` with `n = m − N/2`.
pub fn quantum_second_moment(reg: &QuantumRegister, p0: f64) -> Result<f64> {
    let t = std::f64::consts::TAU / reg.dim() as f64;
    Ok(momentum_distribution(reg)?
        .iter()
        .enumerate()
        .map(|(m, w)| w * (reg.momentum_of(m) as f64 * t - p0).powi(2))
        .sum())
}

/// Second moment of the momentum offset measured on the circle,
/// `Σ_m |c_m|² wrap(nT − p0)²` with `wrap` into `[−π, π)`. A state spread
/// uniformly over the torus gives `π²/3`.
pub fn quantum_second_moment_periodic(reg: &QuantumRegister, p0: f64) -> Result<f64> {
    let t = std::f64::consts::TAU / reg.dim() as f64;
    Ok(momentum_distribution(reg)?
        .iter()
        .enumerate()
        .map(|(m, w)| w * crate::classical::wrap_momentum(reg.momentum_of(m) as f64 * t - p0).powi(2))
        .sum())
}

/// `1 / Σ_m |c_m|⁴`: number of momentum states effectively occupied.
pub fn participation_ratio(reg: &QuantumRegister) -> Result<f64> {
    Ok(1.0 / momentum_distribution(reg)?.iter().map(|w| w * w).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn eigenstate_has_no_spread() {
        let reg = QuantumRegister::momentum_eigenstate(6, 7).unwrap();
        let t = 2.0 * PI / 64.0;
        assert_eq!(quantum_second_moment(&reg, 7.0 * t).unwrap(), 0.0);
        assert_eq!(participation_ratio(&reg).unwrap(), 1.0);
        let d = momentum_distribution(&reg).unwrap();
        assert_eq!(d[7 + 32], 1.0);
        assert_eq!(d.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn uniform_distribution_approaches_ergodic_value() {
        let n = 12;
        let dim = 1usize << n;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        let reg = QuantumRegister::from_amplitudes(n, vec![amp; dim], Basis::Momentum).unwrap();
        let m2 = quantum_second_moment(&reg, 0.0).unwrap();
        // (T²/N) Σ n² for n ∈ [−N/2, N/2)
        let t = 2.0 * PI / dim as f64;
        let exact: f64 = (0..dim).map(|m| (m as f64 - (dim / 2) as f64).powi(2)).sum::<f64>() * t * t / dim as f64;
        assert!((m2 - exact).abs() < 1e-12);
        assert!((m2 - PI * PI / 3.0).abs() < 1e-2);
        // a lattice shift only permutes the wrapped distances
        let wrapped = quantum_second_moment_periodic(&reg, 37.0 * t).unwrap();
        assert!((wrapped - exact).abs() < 1e-9);
    }

    #[test]
    fn periodic_moment_uses_shortest_distance() {
        let n = 6;
        let t = 2.0 * PI / 64.0;
        let reg = QuantumRegister::momentum_eigenstate(n, -31).unwrap();
        let p0 = 31.0 * t;
        assert!((quantum_second_moment(&reg, p0).unwrap() - (62.0 * t).powi(2)).abs() < 1e-12);
        assert!((quantum_second_moment_periodic(&reg, p0).unwrap() - (2.0 * t).powi(2)).abs() < 1e-12);
    }
}
