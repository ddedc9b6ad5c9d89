//! Husimi phase-space distributions on the torus.
//!
//! The coherent state centred at `(θ0, p0)` has momentum amplitudes
//!
//! ```text
//!     ⟨n|χ⟩ ∝ Σ_{|m|≤3} exp(−(nT − p0 − 2πm)² / (4Δp²)) · e^{−i n θ0}
//! ```
//!
//! with `Δp² = s T/2` and `Δθ = Δp / s`, normalized numerically.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::state::{Basis, QuantumRegister};

const IMAGES: i64 = 3;
/// Gaussian factors below `e^{−CUTOFF}` are dropped.
const CUTOFF: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct HusimiGrid {
    /// Density sampled at `(grid.theta_at(i), grid.p_at(j))`, normalized so
    /// that values times the cell area sum to one.
    pub grid: PhaseGrid,
    pub delta_p: f64,
    pub delta_theta: f64,
}

impl HusimiGrid {
    /// Probability (values × cell area) in rows with `|p − p_center| < half_width`,
    /// the distance taken on the circle.
    pub fn mass_near_momentum(&self, p_center: f64, half_width: f64) -> f64 {
        let g = &self.grid;
        let mut mass = 0.0;
        for ip in 0..g.n_p {
            let d = crate::classical::wrap_momentum(g.p_at(ip) - p_center).abs();
            if d < half_width {
                mass += (0..g.n_theta).map(|it| g.get(it, ip)).sum::<f64>();
            }
        }
        mass * g.cell_area()
    }

    /// Probability of `self` inside the cells where `reference` falls below
    /// `fraction` of its maximum.
    pub fn mass_where_reference_below(&self, reference: &HusimiGrid, fraction: f64) -> Result<f64> {
        let (a, b) = (&self.grid, &reference.grid);
        if a.n_theta != b.n_theta || a.n_p != b.n_p {
            return Err(Error::DimensionMismatch {
                left: a.values.len(),
                right: b.values.len(),
            });
        }
        let cut = fraction * b.max();
        let mass: f64 = a
            .values
            .iter()
            .zip(&b.values)
            .filter(|(_, r)| **r < cut)
            .map(|(v, _)| v)
            .sum();
        Ok(mass * a.cell_area())
    }

    /// Marginal over θ, `∫ H dθ` per momentum row.
    pub fn momentum_marginal(&self) -> Vec<f64> {
        let g = &self.grid;
        (0..g.n_p)
            .map(|ip| (0..g.n_theta).map(|it| g.get(it, ip)).sum::<f64>() * g.theta_step())
            .collect()
    }
}

/// Periodic Gaussian weights `g_n` for the coherent state at `p0`, as
/// `(first_index, weights)` covering the non-negligible window of `m`.
pub(crate) fn coherent_weights(dim: usize, p0: f64, delta_p: f64) -> Vec<(usize, f64)> {
    let t = TAU / dim as f64;
    let half = (dim / 2) as f64;
    let four_var = 4.0 * delta_p * delta_p;
    let mut out = Vec::new();
    for m in 0..dim {
        let p = (m as f64 - half) * t;
        let w: f64 = (-IMAGES..=IMAGES)
            .map(|img| {
                let x = p - p0 - TAU * img as f64;
                let e = x * x / four_var;
                if e < CUTOFF {
                    (-e).exp()
                } else {
                    0.0
                }
            })
            .sum();
        if w > 0.0 {
            out.push((m, w));
        }
    }
    out
}

/// Husimi function of a momentum-basis register on an `n_theta × n_p` grid
/// with uncertainty ratio `s = Δp/Δθ`.
pub fn husimi(reg: &QuantumRegister, n_theta: usize, n_p: usize, s: f64) -> Result<HusimiGrid> {
    reg.expect_basis(Basis::Momentum)?;
    if n_theta == 0 || n_p == 0 {
        return Err(Error::invalid("grid", "Husimi grid must be non-empty"));
    }
    if !(s > 0.0) {
        return Err(Error::invalid("s", "uncertainty ratio must be positive"));
    }
    let dim = reg.dim();
    let period = TAU / dim as f64;
    let delta_p = (s * period / 2.0).sqrt();
    let amps = reg.amplitudes();
    // e^{2πi r / n_theta}
    let roots: Vec<Complex64> = (0..n_theta)
        .map(|r| Complex64::from_polar(1.0, TAU * r as f64 / n_theta as f64))
        .collect();
    let half = (dim / 2) as i64;
    let mut grid = PhaseGrid::zeros(n_theta, n_p);
    let p_step = TAU / n_p as f64;
    grid.values.par_chunks_mut(n_theta).enumerate().for_each(|(ip, row)| {
        let p0 = -PI + ip as f64 * p_step;
        let weights = coherent_weights(dim, p0, delta_p);
        let norm2: f64 = weights.iter().map(|(_, w)| w * w).sum();
        let terms: Vec<(i64, Complex64)> = weights
            .iter()
            .map(|&(m, w)| ((m as i64 - half).rem_euclid(n_theta as i64), amps[m] * w))
            .collect();
        for (it, cell) in row.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(n_mod, a) in &terms {
                let r = (n_mod as usize * it) % n_theta;
                acc += a * roots[r];
            }
            *cell = acc.norm_sqr() / norm2;
        }
    });
    let total = grid.sum() * grid.cell_area();
    if total > 0.0 {
        grid.scale(1.0 / total);
    }
    Ok(HusimiGrid {
        grid,
        delta_p,
        delta_theta: delta_p / s,
    })
}

/// Running arithmetic mean of Husimi grids over a time window.
#[derive(Debug, Clone)]
pub struct HusimiAccumulator {
    n_theta: usize,
    n_p: usize,
    s: f64,
    sum: Option<HusimiGrid>,
    frames: usize,
}

impl HusimiAccumulator {
    pub fn new(n_theta: usize, n_p: usize, s: f64) -> Self {
        Self {
            n_theta,
            n_p,
            s,
            sum: None,
            frames: 0,
        }
    }

    pub fn add(&mut self, reg: &QuantumRegister) -> Result<()> {
        let h = husimi(reg, self.n_theta, self.n_p, self.s)?;
        match &mut self.sum {
            None => self.sum = Some(h),
            Some(acc) => acc.grid.add_assign(&h.grid)?,
        }
        self.frames += 1;
        Ok(())
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn mean(&self) -> Option<HusimiGrid> {
        self.sum.as_ref().map(|acc| {
            let mut h = acc.clone();
            h.grid.scale(1.0 / self.frames as f64);
            h
        })
    }
}
