//! Static imperfections and noisy gates between perfect instantaneous gates.
//!
//! Between two gates the register evolves for `τ_g` under
//!
//! ```text
//!     H_s = Σ_i δ_i σ_i^z + Σ_<ij> J_ij σ_i^x σ_j^x
//! ```
//!
//! (the mean splitting `Δ0` is removed exactly by the compensation rotation).
//! `exp(−i H_s τ_g)` is applied as `Z(τ/2) · XX(τ) · Z(τ/2)`: the Z part is
//! diagonal, and all XX terms commute so each edge is exponentiated exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, LatticeLayout};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::state::QuantumRegister;

const STATIC_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;

/// One frozen draw of detunings and couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderRealization {
    /// `δ_i ∈ [−δ/2, δ/2]`.
    pub detunings: Vec<f64>,
    /// `J_ij ∈ [−J, J]` on nearest-neighbour edges, grouped by edge color.
    pub couplings: [Vec<(usize, usize, f64)>; 4],
    pub delta: f64,
    pub coupling: f64,
    pub seed: u64,
}

impl DisorderRealization {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            detunings: vec![0.0; n_qubits],
            couplings: Default::default(),
            delta: 0.0,
            coupling: 0.0,
            seed: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.detunings.len()
    }

    pub fn edge_count(&self) -> usize {
        self.couplings.iter().map(Vec::len).sum()
    }

    pub fn has_couplings(&self) -> bool {
        self.couplings.iter().flatten().any(|&(_, _, j)| j != 0.0)
    }
}

/// Draw detunings uniform in `[−δ/2, δ/2]` and couplings uniform in `[−J, J]`
/// on the edges of `layout`.
pub fn sample_static(delta: f64, coupling: f64, layout: &LatticeLayout, seed: u64) -> Result<DisorderRealization> {
    if !(delta >= 0.0) || !(coupling >= 0.0) {
        return Err(Error::invalid("delta/J", "imperfection strengths must be non-negative"));
    }
    let mut rng = stream_rng(seed, STATIC_STREAM);
    let detunings = (0..layout.n_qubits())
        .map(|_| delta * (rng.gen::<f64>() - 0.5))
        .collect();
    let mut couplings: [Vec<(usize, usize, f64)>; 4] = Default::default();
    for (color, edges) in layout.edge_colors().into_iter().enumerate() {
        couplings[color] = edges
            .into_iter()
            .map(|(a, b)| (a, b, coupling * (2.0 * rng.gen::<f64>() - 1.0)))
            .collect();
    }
    Ok(DisorderRealization {
        detunings,
        couplings,
        delta,
        coupling,
        seed,
    })
}

/// Diagonal `exp(−i Σ_i φ_i σ_i^z)` built by doubling, bit `i` ↔ qubit `i`.
fn z_phase_table(phases: &[f64], out: &mut Vec<Complex64>) {
    out.clear();
    out.push(Complex64::new(1.0, 0.0));
    for &phi in phases {
        let (down, up) = (Complex64::from_polar(1.0, -phi), Complex64::from_polar(1.0, phi));
        let len = out.len();
        out.extend_from_within(..len);
        out[..len].iter_mut().for_each(|d| *d *= down);
        out[len..].iter_mut().for_each(|d| *d *= up);
    }
}

/// `exp(−i φ σ_a^x σ_b^x)` in place.
fn apply_xx(amps: &mut [Complex64], a: usize, b: usize, phi: f64) {
    let (c, s) = (phi.cos(), phi.sin());
    let mask = (1usize << a) | (1usize << b);
    let low = 1usize << a.min(b);
    for x in 0..amps.len() {
        // visit each pair once, from the member with the lower operand bit clear
        if x & low == 0 {
            let y = x ^ mask;
            let (u, v) = (amps[x], amps[y]);
            amps[x] = Complex64::new(c * u.re + s * v.im, c * u.im - s * v.re);
            amps[y] = Complex64::new(c * v.re + s * u.im, c * v.im - s * u.re);
        }
    }
}

/// Precomputed `exp(−i H_s τ_g)` for a frozen realization.
#[derive(Debug, Clone)]
pub struct FreeEvolution {
    /// `Z(τ/2)` if couplings are present, otherwise the full `Z(τ)`.
    z_diag: Vec<Complex64>,
    /// `(a, b, J_ab τ)` in color order.
    xx: Vec<(usize, usize, f64)>,
}

impl FreeEvolution {
    pub fn new(disorder: &DisorderRealization, tau_g: f64) -> Self {
        let xx: Vec<(usize, usize, f64)> = disorder
            .couplings
            .iter()
            .flatten()
            .filter(|&&(_, _, j)| j != 0.0)
            .map(|&(a, b, j)| (a, b, j * tau_g))
            .collect();
        let scale = if xx.is_empty() { tau_g } else { 0.5 * tau_g };
        let phases: Vec<f64> = disorder.detunings.iter().map(|d| d * scale).collect();
        let mut z_diag = Vec::with_capacity(1 << phases.len());
        z_phase_table(&phases, &mut z_diag);
        Self { z_diag, xx }
    }

    pub fn apply(&self, amps: &mut [Complex64]) {
        amps.iter_mut().zip(&self.z_diag).for_each(|(a, d)| *a *= d);
        if self.xx.is_empty() {
            return;
        }
        for &(a, b, phi) in &self.xx {
            apply_xx(amps, a, b, phi);
        }
        amps.iter_mut().zip(&self.z_diag).for_each(|(a, d)| *a *= d);
    }
}

pub fn free_evolution_step(reg: &mut QuantumRegister, disorder: &DisorderRealization, tau_g: f64) -> Result<()> {
    if disorder.n_qubits() != reg.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: reg.n_qubits(),
            right: disorder.n_qubits(),
        });
    }
    FreeEvolution::new(disorder, tau_g).apply(reg.amplitudes_mut());
    Ok(())
}

/// What happens during each inter-gate interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorMode {
    Ideal,
    /// Frozen `δ_i`, `J_ij` for the whole run.
    Static {
        delta: f64,
        coupling: f64,
        tau_g: f64,
    },
    /// `J = 0`, `δ_i` redrawn before every gate.
    NoisyDetuning {
        delta: f64,
        tau_g: f64,
    },
    /// Random-axis rotation by an angle uniform in `[−ε, ε]` on every qubit
    /// touched by the gate, or on all qubits if `all_qubits`.
    RandomRotation {
        epsilon: f64,
        all_qubits: bool,
    },
}

impl ErrorMode {
    /// Static imperfections of strength `ε = δ τ_g` with `J = ratio · δ`.
    pub fn static_from_epsilon(epsilon: f64, coupling_ratio: f64, tau_g: f64) -> Self {
        let delta = epsilon / tau_g;
        ErrorMode::Static {
            delta,
            coupling: coupling_ratio * delta,
            tau_g,
        }
    }

    pub fn noisy_from_epsilon(epsilon: f64, tau_g: f64) -> Self {
        ErrorMode::NoisyDetuning {
            delta: epsilon / tau_g,
            tau_g,
        }
    }

    /// Dimensionless strength `ε`.
    pub fn epsilon(&self) -> f64 {
        match *self {
            ErrorMode::Ideal => 0.0,
            ErrorMode::Static { delta, tau_g, .. } | ErrorMode::NoisyDetuning { delta, tau_g } => delta * tau_g,
            ErrorMode::RandomRotation { epsilon, .. } => epsilon,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ErrorMode::Ideal => "ideal",
            ErrorMode::Static { coupling, .. } if *coupling == 0.0 => "static-j0",
            ErrorMode::Static { .. } => "static",
            ErrorMode::NoisyDetuning { .. } => "noisy-detuning",
            ErrorMode::RandomRotation { .. } => "random-rotation",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ErrorMode::Ideal => true,
            ErrorMode::Static { delta, coupling, tau_g } => delta >= 0.0 && coupling >= 0.0 && tau_g > 0.0,
            ErrorMode::NoisyDetuning { delta, tau_g } => delta >= 0.0 && tau_g > 0.0,
            ErrorMode::RandomRotation { epsilon, .. } => epsilon >= 0.0,
        };
        if ok && self.epsilon().is_finite() {
            Ok(())
        } else {
            Err(Error::invalid("mode", format!("{self:?}")))
        }
    }
}

/// Per-run error channel state.
enum Channel {
    Ideal,
    Static(FreeEvolution),
    Noisy {
        half_width: f64,
        rng: ChaCha8Rng,
        phases: Vec<f64>,
        table: Vec<Complex64>,
    },
    Rotation {
        epsilon: f64,
        all_qubits: bool,
        rng: ChaCha8Rng,
    },
}

impl Channel {
    fn new(mode: &ErrorMode, layout: &LatticeLayout, seed: u64) -> Result<Self> {
        mode.validate()?;
        Ok(match *mode {
            ErrorMode::Ideal => Channel::Ideal,
            ErrorMode::Static { delta, coupling, tau_g } => {
                let disorder = sample_static(delta, coupling, layout, seed)?;
                Channel::Static(FreeEvolution::new(&disorder, tau_g))
            }
            ErrorMode::NoisyDetuning { delta, tau_g } => Channel::Noisy {
                half_width: 0.5 * delta * tau_g,
                rng: stream_rng(seed, NOISE_STREAM),
                phases: vec![0.0; layout.n_qubits()],
                table: Vec::with_capacity(1 << layout.n_qubits()),
            },
            ErrorMode::RandomRotation { epsilon, all_qubits } => Channel::Rotation {
                epsilon,
                all_qubits,
                rng: stream_rng(seed, NOISE_STREAM),
            },
        })
    }

    fn after_gate(&mut self, amps: &mut [Complex64], gate: &Gate, n_qubits: usize) {
        match self {
            Channel::Ideal => {}
            Channel::Static(free) => free.apply(amps),
            Channel::Noisy {
                half_width,
                rng,
                phases,
                table,
            } => {
                for p in phases.iter_mut() {
                    *p = *half_width * (2.0 * rng.gen::<f64>() - 1.0);
                }
                z_phase_table(phases, table);
                amps.iter_mut().zip(table.iter()).for_each(|(a, d)| *a *= d);
            }
            Channel::Rotation {
                epsilon,
                all_qubits,
                rng,
            } => {
                let targets = if *all_qubits {
                    (0..n_qubits).collect()
                } else {
                    gate.qubits()
                };
                for q in targets {
                    let u = random_rotation(rng, *epsilon);
                    apply_single_qubit(amps, q, &u);
                }
            }
        }
    }
}

/// `exp(−i φ n·σ / 2)` with `n` uniform on the sphere, `φ ∈ [−ε, ε]`.
fn random_rotation(rng: &mut ChaCha8Rng, epsilon: f64) -> [Complex64; 4] {
    let z: f64 = 2.0 * rng.gen::<f64>() - 1.0;
    let az: f64 = 2.0 * PI * rng.gen::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (nx, ny, nz) = (r * az.cos(), r * az.sin(), z);
    let phi = epsilon * (2.0 * rng.gen::<f64>() - 1.0);
    let (c, s) = ((0.5 * phi).cos(), (0.5 * phi).sin());
    // c·I − i s (nx X + ny Y + nz Z), row-major
    [
        Complex64::new(c, -s * nz),
        Complex64::new(-s * ny, -s * nx),
        Complex64::new(s * ny, -s * nx),
        Complex64::new(c, s * nz),
    ]
}

fn apply_single_qubit(amps: &mut [Complex64], q: usize, u: &[Complex64; 4]) {
    let stride = 1usize << q;
    for base in (0..amps.len()).step_by(stride << 1) {
        for i in base..base + stride {
            let (x, y) = (amps[i], amps[i + stride]);
            amps[i] = u[0] * x + u[1] * y;
            amps[i + stride] = u[2] * x + u[3] * y;
        }
    }
}

/// Run `t_max` map iterations of `circuit` on `reg`, inserting one error
/// interval after every timed gate.
///
/// `observer(t, state)` is called for `t = 0` and after every iteration; it
/// returns `false` to stop early.
pub fn run_imperfect_evolution<F>(
    reg: &mut QuantumRegister,
    circuit: &Circuit,
    layout: &LatticeLayout,
    mode: &ErrorMode,
    t_max: usize,
    seed: u64,
    mut observer: F,
) -> Result<usize>
where
    F: FnMut(usize, &QuantumRegister) -> bool,
{
    let n = circuit.n_qubits();
    if reg.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            left: reg.n_qubits(),
            right: n,
        });
    }
    if layout.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            left: layout.n_qubits(),
            right: n,
        });
    }
    let mut channel = Channel::new(mode, layout, seed)?;
    if !observer(0, reg) {
        return Ok(0);
    }
    for t in 1..=t_max {
        let amps = reg.amplitudes_mut();
        for gate in circuit.gates() {
            crate::circuit::apply_gate_unchecked(amps, gate);
            if gate.takes_time() {
                channel.after_gate(amps, gate, n);
            }
        }
        if !observer(t, reg) {
            return Ok(t);
        }
    }
    Ok(t_max)
}
