//! Phase-space grids shared by the classical density and Husimi outputs.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Real-valued grid over `θ ∈ [0, 2π)` (columns) and `p ∈ [−π, π)` (rows).
///
/// Row `i` covers momenta `[−π + i·Δp, −π + (i+1)·Δp)`; row 0 is the lowest
/// momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub n_theta: usize,
    pub n_p: usize,
    pub values: Vec<f64>,
}

impl PhaseGrid {
    pub fn zeros(n_theta: usize, n_p: usize) -> Self {
        Self {
            n_theta,
            n_p,
            values: vec![0.0; n_theta * n_p],
        }
    }

    #[inline]
    pub fn get(&self, i_theta: usize, i_p: usize) -> f64 {
        self.values[i_p * self.n_theta + i_theta]
    }

    #[inline]
    pub fn get_mut(&mut self, i_theta: usize, i_p: usize) -> &mut f64 {
        &mut self.values[i_p * self.n_theta + i_theta]
    }

    pub fn theta_step(&self) -> f64 {
        std::f64::consts::TAU / self.n_theta as f64
    }

    pub fn p_step(&self) -> f64 {
        std::f64::consts::TAU / self.n_p as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.theta_step() * self.p_step()
    }

    /// Left edge of column `i`.
    pub fn theta_at(&self, i_theta: usize) -> f64 {
        i_theta as f64 * self.theta_step()
    }

    /// Lower edge of row `i`.
    pub fn p_at(&self, i_p: usize) -> f64 {
        -std::f64::consts::PI + i_p as f64 * self.p_step()
    }

    /// Cell containing the torus point `(theta, p)`.
    pub fn cell_of(&self, theta: f64, p: f64) -> (usize, usize) {
        let it = ((theta / std::f64::consts::TAU) * self.n_theta as f64).floor() as isize;
        let ip = (((p + std::f64::consts::PI) / std::f64::consts::TAU) * self.n_p as f64).floor() as isize;
        (
            it.clamp(0, self.n_theta as isize - 1) as usize,
            ip.clamp(0, self.n_p as isize - 1) as usize,
        )
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn scale(&mut self, factor: f64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
    }

    /// Accumulate `other` into `self` elementwise.
    pub fn add_assign(&mut self, other: &PhaseGrid) -> Result<()> {
        if self.n_theta != other.n_theta || self.n_p != other.n_p {
            return Err(Error::DimensionMismatch {
                left: self.values.len(),
                right: other.values.len(),
            });
        }
        self.values.iter_mut().zip(&other.values).for_each(|(a, b)| *a += b);
        Ok(())
    }

    /// Whitespace-separated matrix, one line per momentum row, lowest p first.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.values.len() * 24);
        for row in self.values.chunks(self.n_theta) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Binary PGM (P5), 8-bit, scaled to the grid maximum. The top image row
    /// is the highest momentum so that `p` runs up the vertical axis.
    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let max = self.max();
        let mut bytes = format!("P5\n{} {}\n255\n", self.n_theta, self.n_p).into_bytes();
        for row in self.values.chunks(self.n_theta).rev() {
            for &v in row {
                let level = if max > 0.0 { (v / max * 255.0).round() } else { 0.0 };
                bytes.push(level.clamp(0.0, 255.0) as u8);
            }
        }
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(&bytes).map_err(|e| Error::io(path, e))
    }
}
