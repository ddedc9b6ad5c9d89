//! Classical sawtooth map on the torus, trajectory ensembles and diffusion fits.
//!
//! In rescaled variables the map reads
//!
//! ```text
//!     p' = p + K (θ − π)
//!     θ' = θ + p'          (mod 2π)
//! ```
//!
//! with `p` wrapped into `[−π, π)`. Ensembles additionally carry the unwrapped
//! momentum so that `⟨(Δp)²⟩` keeps growing past the torus size.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::rng::stream_rng;

/// Trajectories per deterministic reduction chunk.
const CHUNK: usize = 1024;

/// Wrap an angle into `[0, 2π)`.
#[inline]
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Wrap a momentum into `[−π, π)`.
#[inline]
pub fn wrap_momentum(p: f64) -> f64 {
    let r = (p + PI).rem_euclid(TAU);
    if r >= TAU {
        -PI
    } else {
        r - PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub p: f64,
    pub theta: f64,
}

impl ClassicalState {
    pub fn new(p: f64, theta: f64) -> Self {
        Self {
            p: wrap_momentum(p),
            theta: wrap_angle(theta),
        }
    }
}

/// One iteration of the map.
#[inline]
pub fn classical_step(state: ClassicalState, k: f64) -> ClassicalState {
    let p = wrap_momentum(state.p + k * (state.theta - PI));
    let theta = wrap_angle(state.theta + p);
    ClassicalState { p, theta }
}

/// How initial conditions are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// All trajectories at `p0`, angles uniform in `[0, 2π)`.
    RandomAngles,
    /// All trajectories at `(theta, p0)`.
    Point { theta: f64 },
    /// Uniform over the whole torus; `p0` is only the reference for `Δp`.
    UniformTorus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub count: usize,
    pub p0: f64,
    pub k: f64,
    pub t_max: usize,
    pub noise_amplitude: f64,
    pub seed: u64,
    pub initial: InitialCondition,
}

impl EnsembleConfig {
    pub fn new(count: usize, p0: f64, k: f64, t_max: usize, seed: u64) -> Self {
        Self {
            count,
            p0,
            k,
            t_max,
            noise_amplitude: 0.0,
            seed,
            initial: InitialCondition::RandomAngles,
        }
    }

    pub fn with_noise(mut self, amplitude: f64) -> Self {
        self.noise_amplitude = amplitude;
        self
    }

    pub fn with_initial(mut self, initial: InitialCondition) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::invalid("count", "ensemble must hold at least one trajectory"));
        }
        if self.t_max == 0 {
            return Err(Error::invalid("t_max", "need at least one iteration"));
        }
        if !(self.noise_amplitude >= 0.0) {
            return Err(Error::invalid("noise_amplitude", "must be non-negative"));
        }
        if !self.k.is_finite() || !self.p0.is_finite() {
            return Err(Error::invalid("k", "map parameters must be finite"));
        }
        Ok(())
    }
}

/// Trajectory carrying both the torus state and the unwrapped momentum shift.
#[derive(Debug, Clone, Copy)]
struct Walker {
    state: ClassicalState,
    shift: f64,
}

struct Trajectory {
    rng: rand_chacha::ChaCha8Rng,
    walker: Walker,
    k: f64,
    noise: f64,
}

impl Trajectory {
    fn start(cfg: &EnsembleConfig, index: usize) -> Self {
        let mut rng = stream_rng(cfg.seed, index as u64);
        let state = match cfg.initial {
            InitialCondition::RandomAngles => ClassicalState::new(cfg.p0, rng.gen_range(0.0..TAU)),
            InitialCondition::Point { theta } => ClassicalState::new(cfg.p0, theta),
            InitialCondition::UniformTorus => {
                let theta = rng.gen_range(0.0..TAU);
                let p = rng.gen_range(-PI..PI);
                ClassicalState::new(p, theta)
            }
        };
        let shift = match cfg.initial {
            InitialCondition::UniformTorus => state.p - cfg.p0,
            _ => 0.0,
        };
        Self {
            rng,
            walker: Walker { state, shift },
            k: cfg.k,
            noise: cfg.noise_amplitude,
        }
    }

    #[inline]
    fn advance(&mut self) {
        let Walker { state, shift } = &mut self.walker;
        let kick = self.k * (state.theta - PI);
        *shift += kick;
        let mut p = state.p + kick;
        let mut theta = state.theta + p;
        if self.noise > 0.0 {
            let dp = self.rng.gen_range(-self.noise..=self.noise);
            let dt = self.rng.gen_range(-self.noise..=self.noise);
            p += dp;
            *shift += dp;
            theta += dt;
        }
        *state = ClassicalState {
            p: wrap_momentum(p),
            theta: wrap_angle(theta),
        };
    }
}

/// `⟨(Δp)²⟩` per iteration, `Δp` taken on the unwrapped momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMoments {
    /// `m2[t]` for `t = 0..=t_max`.
    pub m2: Vec<f64>,
    pub count: usize,
}

impl EnsembleMoments {
    pub fn t_max(&self) -> usize {
        self.m2.len() - 1
    }

    pub fn records(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.m2.iter().copied().enumerate()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,m2\n");
        for (t, m) in self.records() {
            s.push_str(&format!("{t},{m:.17e}\n"));
        }
        s
    }
}

/// Evolve the ensemble and collect `⟨(Δp)²⟩(t)`.
///
/// Trajectory `i` uses RNG stream `i` of `cfg.seed`; partial sums are formed
/// over fixed-size chunks and combined in chunk order, so the result is
/// bit-identical whatever the thread count.
pub fn evolve_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleMoments> {
    cfg.validate()?;
    let t_max = cfg.t_max;
    let n_chunks = cfg.count.div_ceil(CHUNK);
    let partials: Vec<Vec<f64>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut sums = vec![0.0; t_max + 1];
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(cfg.count);
            for i in lo..hi {
                let mut traj = Trajectory::start(cfg, i);
                sums[0] += traj.walker.shift * traj.walker.shift;
                for s in sums.iter_mut().skip(1) {
                    traj.advance();
                    *s += traj.walker.shift * traj.walker.shift;
                }
            }
            sums
        })
        .collect();
    let mut m2 = vec![0.0; t_max + 1];
    for part in &partials {
        for (acc, v) in m2.iter_mut().zip(part) {
            *acc += v;
        }
    }
    let n = cfg.count as f64;
    m2.iter_mut().for_each(|v| *v /= n);
    Ok(EnsembleMoments { m2, count: cfg.count })
}

/// Histogram of all trajectories over `t ∈ [t_lo, t_hi]`, normalized so the
/// cells sum to one.
pub fn classical_phase_density(
    cfg: &EnsembleConfig,
    n_theta: usize,
    n_p: usize,
    t_lo: usize,
    t_hi: usize,
) -> Result<PhaseGrid> {
    if n_theta < 2 || n_p < 2 {
        return Err(Error::invalid("grid", "each grid dimension must be at least 2"));
    }
    if t_lo > t_hi {
        return Err(Error::invalid("t_window", format!("empty window [{t_lo}, {t_hi}]")));
    }
    let mut cfg = cfg.clone();
    cfg.t_max = cfg.t_max.max(t_hi).max(1);
    cfg.validate()?;
    let n_chunks = cfg.count.div_ceil(CHUNK);
    let partials: Vec<Vec<u64>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let shape = PhaseGrid::zeros(n_theta, n_p);
            let mut counts = vec![0u64; n_theta * n_p];
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(cfg.count);
            for i in lo..hi {
                let mut traj = Trajectory::start(&cfg, i);
                for t in 0..=t_hi {
                    if t > 0 {
                        traj.advance();
                    }
                    if t >= t_lo {
                        let s = traj.walker.state;
                        let (it, ip) = shape.cell_of(s.theta, s.p);
                        counts[ip * n_theta + it] += 1;
                    }
                }
            }
            counts
        })
        .collect();
    let mut grid = PhaseGrid::zeros(n_theta, n_p);
    let mut total = 0u64;
    for part in &partials {
        for (acc, &v) in grid.values.iter_mut().zip(part) {
            *acc += v as f64;
            total += v;
        }
    }
    grid.scale(1.0 / total as f64);
    Ok(grid)
}

/// Least-squares fit of `log m2` against `log t` over `[t_min, t_max]`.
/// Returns `(α, prefactor)` with `m2 ≈ prefactor · t^α`.
pub fn fit_power_law(moments: &EnsembleMoments, t_min: usize, t_max: usize) -> Result<(f64, f64)> {
    let window = fit_window(moments, t_min, t_max)?;
    let mut xs = Vec::with_capacity(window.len());
    let mut ys = Vec::with_capacity(window.len());
    for (t, m) in window {
        if !(m > 0.0) {
            return Err(Error::Fit(format!("m2({t}) = {m} is not positive")));
        }
        xs.push((t as f64).ln());
        ys.push(m.ln());
    }
    let line = crate::analysis::fit::linear_fit(&xs, &ys)?;
    Ok((line.slope, line.intercept.exp()))
}

/// Slope of a straight-line fit of `m2` against `t` over `[t_min, t_max]`,
/// i.e. the diffusion coefficient `D` in `⟨(Δp)²⟩ ≈ D t`.
pub fn fit_diffusion_coefficient(moments: &EnsembleMoments, t_min: usize, t_max: usize) -> Result<f64> {
    let window = fit_window(moments, t_min, t_max)?;
    let xs: Vec<f64> = window.iter().map(|&(t, _)| t as f64).collect();
    let ys: Vec<f64> = window.iter().map(|&(_, m)| m).collect();
    Ok(crate::analysis::fit::linear_fit(&xs, &ys)?.slope)
}

fn fit_window(moments: &EnsembleMoments, t_min: usize, t_max: usize) -> Result<Vec<(usize, f64)>> {
    if t_min < 1 || t_max <= t_min {
        return Err(Error::Fit(format!("bad window [{t_min}, {t_max}]")));
    }
    if t_max > moments.t_max() {
        return Err(Error::Fit(format!(
            "window end {t_max} beyond available t_max {}",
            moments.t_max()
        )));
    }
    let window: Vec<(usize, f64)> = (t_min..=t_max).map(|t| (t, moments.m2[t])).collect();
    if window.len() < 3 {
        return Err(Error::Fit("need at least 3 points".into()));
    }
    Ok(window)
}
