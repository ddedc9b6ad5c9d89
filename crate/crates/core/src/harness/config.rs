//! Flat `key = value` run configuration.
//!
//! Lists are comma separated, `#` starts a comment, unknown keys are
//! rejected. [`RunConfig::to_text`] writes every key so an emitted file
//! fully describes a run.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hardware::ErrorMode;

/// The runnable presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    HusimiPanel,
    FidelityTrace,
    TfScaling,
    ClassicalDiffusion,
    OracleCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::HusimiPanel,
        Experiment::FidelityTrace,
        Experiment::TfScaling,
        Experiment::ClassicalDiffusion,
        Experiment::OracleCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::HusimiPanel => "husimi-panel",
            Experiment::FidelityTrace => "fidelity-trace",
            Experiment::TfScaling => "tf-scaling",
            Experiment::ClassicalDiffusion => "classical-diffusion",
            Experiment::OracleCheck => "oracle-check",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Which imperfection model a quantum run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Ideal,
    Static,
    Noisy,
    Rotation,
}

impl ModeKind {
    pub fn name(self) -> &'static str {
        match self {
            ModeKind::Ideal => "ideal",
            ModeKind::Static => "static",
            ModeKind::Noisy => "noisy",
            ModeKind::Rotation => "rotation",
        }
    }
}

impl FromStr for ModeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(ModeKind::Ideal),
            "static" => Ok(ModeKind::Static),
            "noisy" => Ok(ModeKind::Noisy),
            "rotation" => Ok(ModeKind::Rotation),
            _ => Err(Error::Config(format!("unknown error mode `{s}`"))),
        }
    }
}

/// Everything a preset needs. Defaults depend on the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub n_qubits: Vec<usize>,
    /// Classical chaos parameter `K`.
    pub chaos: f64,
    /// Initial momentum index; `None` means `⌊0.38 N⌋`.
    pub n0: Option<i64>,
    pub iterations: usize,
    pub error_mode: ModeKind,
    /// Imperfection strengths. Empty in `husimi-panel` selects the
    /// `ε ∝ n_q⁻³` rule.
    pub epsilon: Vec<f64>,
    /// `J/δ` values for static runs.
    pub coupling_ratio: Vec<f64>,
    pub tau_g: f64,
    pub rotate_all_qubits: bool,
    pub seed: u64,
    pub realizations: usize,
    pub fidelity_threshold: f64,
    pub fit_f_min: f64,
    pub fit_f_max: f64,
    pub grid: usize,
    pub husimi_s: f64,
    pub average_from: usize,
    pub classical_kicks: Vec<f64>,
    pub trajectories: usize,
    pub classical_noise: f64,
    pub fit_t_min: usize,
    pub fit_t_max: usize,
    pub out_dir: PathBuf,
    pub jobs: usize,
}

impl RunConfig {
    pub fn preset(experiment: Experiment) -> Self {
        let mut c = RunConfig {
            experiment,
            n_qubits: vec![9],
            chaos: -0.1,
            n0: None,
            iterations: 1000,
            error_mode: ModeKind::Static,
            epsilon: vec![1e-4],
            coupling_ratio: vec![0.0],
            tau_g: 1.0,
            rotate_all_qubits: false,
            seed: 1,
            realizations: 1,
            fidelity_threshold: 0.9,
            fit_f_min: 0.5,
            fit_f_max: 0.999,
            grid: 128,
            husimi_s: 1.0,
            average_from: 950,
            classical_kicks: Vec::new(),
            trajectories: 0,
            classical_noise: 0.0,
            fit_t_min: 10,
            fit_t_max: 1000,
            out_dir: PathBuf::from("out"),
            jobs: 1,
        };
        match experiment {
            Experiment::HusimiPanel => {
                c.n_qubits = vec![6, 9];
                c.epsilon = Vec::new();
                c.trajectories = 100_000;
                c.classical_noise = 1e-3;
            }
            Experiment::FidelityTrace => {
                c.epsilon = vec![1e-5, 3e-5, 1e-4, 3e-4, 1e-3];
                c.coupling_ratio = vec![1.0, 0.0];
            }
            Experiment::TfScaling => {
                c.epsilon = vec![3e-6, 1e-5, 3e-5, 1e-4];
                c.coupling_ratio = vec![0.0, 1.0];
                c.iterations = 20_000;
                c.realizations = 20;
            }
            Experiment::ClassicalDiffusion => {
                c.classical_kicks = vec![2.0, 0.5, -0.1];
                c.trajectories = 100_000;
            }
            Experiment::OracleCheck => {
                c.n_qubits = (2..=10).collect();
                c.iterations = 100;
                c.error_mode = ModeKind::Ideal;
                c.epsilon = Vec::new();
            }
        }
        c
    }

    /// Parse `text` on top of the preset for `experiment`. A file that names
    /// a different experiment is rejected.
    pub fn parse(text: &str, experiment: Option<Experiment>) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                reason: "expected `key = value`".into(),
            })?;
            pairs.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let named = pairs
            .iter()
            .find(|(_, k, _)| k == "experiment")
            .map(|(_, _, v)| v.parse::<Experiment>())
            .transpose()?;
        let experiment = match (experiment, named) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!(
                    "config is for `{b}` but preset `{a}` was requested"
                )))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::Config("no experiment given".into())),
        };
        let mut c = RunConfig::preset(experiment);
        for (line, k, v) in pairs {
            c.set(&k, &v).map_err(|e| match e {
                Error::Config(reason) => Error::Parse { line, reason },
                other => other,
            })?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path, experiment: Option<Experiment>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::parse(&text, experiment)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => self.experiment = value.parse()?,
            "n_qubits" => self.n_qubits = list(key, value)?,
            "chaos" => self.chaos = scalar(key, value)?,
            "n0" => {
                self.n0 = if value == "auto" {
                    None
                } else {
                    Some(scalar(key, value)?)
                }
            }
            "iterations" => self.iterations = scalar(key, value)?,
            "error_mode" => self.error_mode = value.parse()?,
            "epsilon" => self.epsilon = list(key, value)?,
            "coupling_ratio" => self.coupling_ratio = list(key, value)?,
            "tau_g" => self.tau_g = scalar(key, value)?,
            "rotate_all_qubits" => self.rotate_all_qubits = scalar(key, value)?,
            "seed" => self.seed = scalar(key, value)?,
            "realizations" => self.realizations = scalar(key, value)?,
            "fidelity_threshold" => self.fidelity_threshold = scalar(key, value)?,
            "fit_f_min" => self.fit_f_min = scalar(key, value)?,
            "fit_f_max" => self.fit_f_max = scalar(key, value)?,
            "grid" => self.grid = scalar(key, value)?,
            "husimi_s" => self.husimi_s = scalar(key, value)?,
            "average_from" => self.average_from = scalar(key, value)?,
            "classical_kicks" => self.classical_kicks = list(key, value)?,
            "trajectories" => self.trajectories = scalar(key, value)?,
            "classical_noise" => self.classical_noise = scalar(key, value)?,
            "fit_t_min" => self.fit_t_min = scalar(key, value)?,
            "fit_t_max" => self.fit_t_max = scalar(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "jobs" => self.jobs = scalar(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Every key, one per line, in a fixed order.
    pub fn to_text(&self) -> String {
        let n0 = self.n0.map_or("auto".to_string(), |n| n.to_string());
        let lines = [
            ("experiment", self.experiment.to_string()),
            ("n_qubits", join(&self.n_qubits)),
            ("chaos", format!("{:?}", self.chaos)),
            ("n0", n0),
            ("iterations", self.iterations.to_string()),
            ("error_mode", self.error_mode.name().to_string()),
            ("epsilon", join_f(&self.epsilon)),
            ("coupling_ratio", join_f(&self.coupling_ratio)),
            ("tau_g", format!("{:?}", self.tau_g)),
            ("rotate_all_qubits", self.rotate_all_qubits.to_string()),
            ("seed", self.seed.to_string()),
            ("realizations", self.realizations.to_string()),
            ("fidelity_threshold", format!("{:?}", self.fidelity_threshold)),
            ("fit_f_min", format!("{:?}", self.fit_f_min)),
            ("fit_f_max", format!("{:?}", self.fit_f_max)),
            ("grid", self.grid.to_string()),
            ("husimi_s", format!("{:?}", self.husimi_s)),
            ("average_from", self.average_from.to_string()),
            ("classical_kicks", join_f(&self.classical_kicks)),
            ("trajectories", self.trajectories.to_string()),
            ("classical_noise", format!("{:?}", self.classical_noise)),
            ("fit_t_min", self.fit_t_min.to_string()),
            ("fit_t_max", self.fit_t_max.to_string()),
            ("out_dir", self.out_dir.display().to_string()),
            ("jobs", self.jobs.to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(name: &'static str, reason: &str) -> Result<()> {
            Err(Error::invalid(name, reason))
        }
        if self.n_qubits.is_empty() && self.experiment != Experiment::ClassicalDiffusion {
            return bad("n_qubits", "at least one register size is required");
        }
        if let Some(&n) = self.n_qubits.iter().find(|&&n| n == 0 || n > crate::state::MAX_QUBITS) {
            return bad("n_qubits", &format!("{n} is outside 1..={}", crate::state::MAX_QUBITS));
        }
        if !self.chaos.is_finite() {
            return bad("chaos", "must be finite");
        }
        if self.iterations == 0 {
            return bad("iterations", "must be positive");
        }
        if self.epsilon.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
            return bad("epsilon", "must be finite and non-negative");
        }
        if self.coupling_ratio.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
            return bad("coupling_ratio", "must be finite and non-negative");
        }
        if !(self.tau_g > 0.0) || !self.tau_g.is_finite() {
            return bad("tau_g", "must be positive");
        }
        if self.realizations == 0 {
            return bad("realizations", "must be positive");
        }
        if !(self.fidelity_threshold > 0.0 && self.fidelity_threshold < 1.0) {
            return bad("fidelity_threshold", "must lie in (0, 1)");
        }
        if !(0.0 < self.fit_f_min && self.fit_f_min < self.fit_f_max && self.fit_f_max < 1.0) {
            return bad("fit_f_min/fit_f_max", "need 0 < fit_f_min < fit_f_max < 1");
        }
        if self.grid == 0 {
            return bad("grid", "must be positive");
        }
        if !(self.husimi_s > 0.0) || !self.husimi_s.is_finite() {
            return bad("husimi_s", "must be positive");
        }
        if self.experiment == Experiment::HusimiPanel && self.average_from > self.iterations {
            return bad("average_from", "must not exceed iterations");
        }
        if self.experiment == Experiment::HusimiPanel
            && !self.epsilon.is_empty()
            && self.epsilon.len() != self.n_qubits.len()
        {
            return bad(
                "epsilon",
                "give one value per register size, or none for the n_q⁻³ rule",
            );
        }
        if self.experiment == Experiment::ClassicalDiffusion {
            if self.classical_kicks.is_empty() {
                return bad("classical_kicks", "at least one K is required");
            }
            if self.trajectories == 0 {
                return bad("trajectories", "must be positive");
            }
        }
        if !(self.classical_noise >= 0.0) {
            return bad("classical_noise", "must be non-negative");
        }
        if self.fit_t_min == 0 || self.fit_t_min >= self.fit_t_max {
            return bad("fit_t_min/fit_t_max", "need 0 < fit_t_min < fit_t_max");
        }
        if self.jobs == 0 {
            return bad("jobs", "must be positive");
        }
        Ok(())
    }

    /// The error model for one `(ε, J/δ)` point.
    pub fn mode_for(&self, epsilon: f64, coupling_ratio: f64) -> ErrorMode {
        match self.error_mode {
            ModeKind::Ideal => ErrorMode::Ideal,
            ModeKind::Static => ErrorMode::static_from_epsilon(epsilon, coupling_ratio, self.tau_g),
            ModeKind::Noisy => ErrorMode::noisy_from_epsilon(epsilon, self.tau_g),
            ModeKind::Rotation => ErrorMode::RandomRotation {
                epsilon,
                all_qubits: self.rotate_all_qubits,
            },
        }
    }

    /// `J/δ` values that matter for the configured mode.
    pub fn coupling_ratios(&self) -> Vec<f64> {
        if self.error_mode == ModeKind::Static && !self.coupling_ratio.is_empty() {
            self.coupling_ratio.clone()
        } else {
            vec![0.0]
        }
    }
}

/// `ε` for a register size under the `ε ∝ n_q⁻³` rule, anchored at
/// `(6, 2e-3)`, `(9, 6e-4)` and `(16, 1e-4)`. Anchor sizes return the
/// anchor value; other sizes use the log-mean prefactor.
pub fn scaled_epsilon(n_qubits: usize) -> f64 {
    const ANCHORS: [(usize, f64); 3] = [(6, 2e-3), (9, 6e-4), (16, 1e-4)];
    if let Some(&(_, e)) = ANCHORS.iter().find(|(n, _)| *n == n_qubits) {
        return e;
    }
    let log_c = ANCHORS
        .iter()
        .map(|&(n, e)| e.ln() + 3.0 * (n as f64).ln())
        .sum::<f64>()
        / ANCHORS.len() as f64;
    (log_c - 3.0 * (n_qubits as f64).ln()).exp()
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| scalar(key, v.trim())).collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn join_f(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}
