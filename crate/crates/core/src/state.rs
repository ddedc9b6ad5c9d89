//! Quantum register and the exact split-operator engine.
//!
//! Basis index `m ∈ [0, N)` labels momentum `n = m − N/2`; angle index `l`
//! labels `θ_l = 2πl/N`. One map iteration is
//!
//! ```text
//!     U = exp(−i T n²/2) · exp(i k (θ − π)²/2)
//! ```
//!
//! applied as kick (angle basis) then free rotation (momentum basis).

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 24;

/// Parameters of one quantum sawtooth map instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SawtoothParams {
    pub n_qubits: usize,
    /// Classical chaos parameter `K = kT`.
    pub chaos: f64,
    /// Initial momentum quantum number `n0 ∈ [−N/2, N/2)`.
    pub n0: i64,
}

impl SawtoothParams {
    pub fn new(n_qubits: usize, chaos: f64, n0: i64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::invalid(
                "n_qubits",
                format!("{n_qubits} not in 1..={MAX_QUBITS}"),
            ));
        }
        if !chaos.is_finite() {
            return Err(Error::invalid("K", "must be finite"));
        }
        let half = 1i64 << (n_qubits - 1);
        if n0 < -half || n0 >= half {
            return Err(Error::invalid("n0", format!("{n0} outside [{}, {half})", -half)));
        }
        Ok(Self { n_qubits, chaos, n0 })
    }

    /// `n0 = ⌊0.38 N⌋`, the initial condition used for the phase-space studies.
    pub fn with_default_n0(n_qubits: usize, chaos: f64) -> Result<Self> {
        let n = 1usize << n_qubits.min(MAX_QUBITS);
        Self::new(n_qubits, chaos, (0.38 * n as f64).floor() as i64)
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// `T = 2π/N`.
    pub fn period(&self) -> f64 {
        TAU / self.dim() as f64
    }

    /// Kick strength `k = K/T`.
    pub fn kick(&self) -> f64 {
        self.chaos / self.period()
    }

    /// Rescaled initial momentum `p0 = n0 T`.
    pub fn p0(&self) -> f64 {
        self.n0 as f64 * self.period()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Momentum,
    Angle,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Momentum => "momentum",
            Basis::Angle => "angle",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `2^n_q` complex amplitudes tagged with their representation.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRegister {
    n_qubits: usize,
    amps: Vec<Complex64>,
    basis: Basis,
}

impl QuantumRegister {
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>, basis: Basis) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::invalid("n_qubits", format!("{n_qubits} > {MAX_QUBITS}")));
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: 1 << n_qubits,
            });
        }
        Ok(Self { n_qubits, amps, basis })
    }

    /// Momentum eigenstate `|n⟩` stored at `m = n + N/2`.
    pub fn momentum_eigenstate(n_qubits: usize, n: i64) -> Result<Self> {
        let params = SawtoothParams::new(n_qubits, 0.0, n)?;
        Ok(init_momentum_eigenstate(&params))
    }

    /// Haar-like random normalized state (Gaussian components).
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, basis: Basis, rng: &mut R) -> Self {
        let mut amps: Vec<Complex64> = (0..1usize << n_qubits)
            .map(|_| {
                let (u1, u2): (f64, f64) = (rng.gen_range(1e-300..1.0), rng.gen());
                let r = (-2.0 * u1.ln()).sqrt();
                Complex64::from_polar(r, TAU * u2)
            })
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Self { n_qubits, amps, basis }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// Momentum quantum number of basis index `m`.
    #[inline]
    pub fn momentum_of(&self, m: usize) -> i64 {
        m as i64 - (self.dim() / 2) as i64
    }

    pub fn expect_basis(&self, expected: Basis) -> Result<()> {
        if self.basis != expected {
            return Err(Error::BasisMismatch {
                expected: expected.name(),
                actual: self.basis.name(),
            });
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    /// Little-endian `(re, im)` f64 pairs, no header.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(self.amps.len() * 16);
        for a in &self.amps {
            bytes.extend_from_slice(&a.re.to_le_bytes());
            bytes.extend_from_slice(&a.im.to_le_bytes());
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&bytes).map_err(|e| Error::io(path, e))
    }

    pub fn read_binary(path: &Path, basis: Basis) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        if bytes.len() % 16 != 0 || !(bytes.len() / 16).is_power_of_two() {
            return Err(Error::Parse {
                line: 0,
                reason: format!("{} bytes is not a register snapshot", bytes.len()),
            });
        }
        let amps: Vec<Complex64> = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        let n_qubits = amps.len().trailing_zeros() as usize;
        Self::from_amplitudes(n_qubits, amps, basis)
    }

    /// `m,re,im` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,re,im\n");
        for (m, a) in self.amps.iter().enumerate() {
            s.push_str(&format!("{m},{:.17e},{:.17e}\n", a.re, a.im));
        }
        s
    }
}

pub fn init_momentum_eigenstate(params: &SawtoothParams) -> QuantumRegister {
    let dim = params.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[(params.n0 + (dim / 2) as i64) as usize] = Complex64::new(1.0, 0.0);
    QuantumRegister {
        n_qubits: params.n_qubits,
        amps,
        basis: Basis::Momentum,
    }
}

pub fn inner_product(a: &QuantumRegister, b: &QuantumRegister) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    b.expect_basis(a.basis)?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

pub fn norm(reg: &QuantumRegister) -> f64 {
    reg.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// FFT plans and diagonal phase tables for one `SawtoothParams`.
pub struct ExactEngine {
    params: SawtoothParams,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kick: Vec<Complex64>,
    rotation: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl fmt::Debug for ExactEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExactEngine").field("params", &self.params).finish()
    }
}

impl ExactEngine {
    pub fn new(params: &SawtoothParams) -> Self {
        let dim = params.dim();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(dim);
        let inverse = planner.plan_fft_inverse(dim);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        let k = params.kick();
        let t = params.period();
        let kick = (0..dim)
            .map(|l| {
                let x = TAU * l as f64 / dim as f64 - PI;
                Complex64::from_polar(1.0, 0.5 * k * x * x)
            })
            .collect();
        let rotation = (0..dim)
            .map(|m| {
                let n = m as f64 - (dim / 2) as f64;
                Complex64::from_polar(1.0, -0.5 * t * n * n)
            })
            .collect();
        Self {
            params: *params,
            forward,
            inverse,
            kick,
            rotation,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn params(&self) -> &SawtoothParams {
        &self.params
    }

    fn check_dim(&self, reg: &QuantumRegister) -> Result<()> {
        if reg.dim() != self.params.dim() {
            return Err(Error::DimensionMismatch {
                left: reg.dim(),
                right: self.params.dim(),
            });
        }
        Ok(())
    }

    /// `ψ(θ_l) = N^{-1/2} Σ_m c_m e^{i n θ_l}`; the `n = m − N/2` offset is the
    /// factor `(−1)^l` on top of an index-based inverse DFT.
    pub fn to_angle(&mut self, reg: &mut QuantumRegister) -> Result<()> {
        self.check_dim(reg)?;
        reg.expect_basis(Basis::Momentum)?;
        self.inverse.process_with_scratch(&mut reg.amps, &mut self.scratch);
        let scale = 1.0 / (reg.dim() as f64).sqrt();
        for (l, a) in reg.amps.iter_mut().enumerate() {
            *a *= if l & 1 == 0 { scale } else { -scale };
        }
        reg.basis = Basis::Angle;
        Ok(())
    }

    pub fn to_momentum(&mut self, reg: &mut QuantumRegister) -> Result<()> {
        self.check_dim(reg)?;
        reg.expect_basis(Basis::Angle)?;
        let scale = 1.0 / (reg.dim() as f64).sqrt();
        for (l, a) in reg.amps.iter_mut().enumerate() {
            *a *= if l & 1 == 0 { scale } else { -scale };
        }
        self.forward.process_with_scratch(&mut reg.amps, &mut self.scratch);
        reg.basis = Basis::Momentum;
        Ok(())
    }

    /// One forward map iteration on a momentum-basis register.
    pub fn step(&mut self, reg: &mut QuantumRegister) -> Result<()> {
        self.to_angle(reg)?;
        mul_diag(&mut reg.amps, &self.kick, false);
        self.to_momentum(reg)?;
        mul_diag(&mut reg.amps, &self.rotation, false);
        Ok(())
    }

    /// Exact inverse of [`step`](Self::step).
    pub fn step_back(&mut self, reg: &mut QuantumRegister) -> Result<()> {
        reg.expect_basis(Basis::Momentum)?;
        mul_diag(&mut reg.amps, &self.rotation, true);
        self.to_angle(reg)?;
        mul_diag(&mut reg.amps, &self.kick, true);
        self.to_momentum(reg)
    }

    pub fn run(&mut self, reg: &mut QuantumRegister, iterations: usize) -> Result<()> {
        for _ in 0..iterations {
            self.step(reg)?;
        }
        Ok(())
    }
}

fn mul_diag(amps: &mut [Complex64], diag: &[Complex64], conjugate: bool) {
    if conjugate {
        amps.iter_mut().zip(diag).for_each(|(a, d)| *a *= d.conj());
    } else {
        amps.iter_mut().zip(diag).for_each(|(a, d)| *a *= d);
    }
}

pub fn transform_to_angle(reg: &mut QuantumRegister) -> Result<()> {
    let params = SawtoothParams::new(reg.n_qubits(), 0.0, 0)?;
    ExactEngine::new(&params).to_angle(reg)
}

pub fn transform_to_momentum(reg: &mut QuantumRegister) -> Result<()> {
    let params = SawtoothParams::new(reg.n_qubits(), 0.0, 0)?;
    ExactEngine::new(&params).to_momentum(reg)
}

/// Single iteration with a throwaway engine; use [`ExactEngine`] in loops.
pub fn exact_map_iteration(reg: &mut QuantumRegister, params: &SawtoothParams) -> Result<()> {
    ExactEngine::new(params).step(reg)
}
