use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, LatticeLayout};
use crate::error::{Error, Result};
use crate::hardware::{run_imperfect_evolution, ErrorMode};
use crate::state::{init_momentum_eigenstate, inner_product, ExactEngine, QuantumRegister, SawtoothParams};

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &QuantumRegister, b: &QuantumRegister) -> Result<f64> {
    Ok(inner_product(a, b)?.norm_sqr())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    /// `(t, f(t))`, consecutive map iterations starting at 0.
    pub records: Vec<(usize, f64)>,
    pub n_qubits: usize,
    pub epsilon: f64,
    pub mode: String,
    pub seed: u64,
}

impl FidelityTrace {
    pub fn from_values(values: &[f64]) -> Self {
        Self {
            records: values.iter().copied().enumerate().collect(),
            n_qubits: 0,
            epsilon: 0.0,
            mode: String::new(),
            seed: 0,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,f\n");
        for &(t, f) in &self.records {
            s.push_str(&format!("{t},{f:.17e}\n"));
        }
        s
    }
}

/// First time `f` drops below `c`, interpolated linearly in `(t, ln f)`
/// between the bracketing records; `+∞` if it never does.
pub fn fidelity_time(trace: &FidelityTrace, c: f64) -> Result<f64> {
    if trace.records.is_empty() {
        return Err(Error::invalid("trace", "empty fidelity trace"));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::invalid("c", format!("{c} not in (0, 1)")));
    }
    let first = trace.records[0];
    if first.1 < c {
        return Ok(first.0 as f64);
    }
    for w in trace.records.windows(2) {
        let ((t1, f1), (t2, f2)) = (w[0], w[1]);
        if f2 < c {
            let frac = if f2 > 0.0 {
                (c.ln() - f1.ln()) / (f2.ln() - f1.ln())
            } else {
                (f1 - c) / (f1 - f2)
            };
            return Ok(t1 as f64 + frac * (t2 as f64 - t1 as f64));
        }
    }
    Ok(f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayModel {
    /// `f ≈ exp(−A t²)`
    Gaussian,
    /// `f ≈ exp(−B t)`
    Exponential,
}

/// Range of fidelities used in decay fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub f_min: f64,
    pub f_max: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            f_min: 0.5,
            f_max: 0.999,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub model: DecayModel,
    /// `A` or `B` of the selected model.
    pub rate: f64,
    pub gaussian_rate: f64,
    pub exponential_rate: f64,
    pub gaussian_residual: f64,
    pub exponential_residual: f64,
    pub points: usize,
}

/// Fit `−ln f` against `t²` and against `t` (both through the origin, since
/// `f(0) = 1`) and keep the model with the smaller residual sum.
///
/// Points are taken from `t ≥ 1` up to the first drop below `f_min`, keeping
/// those with `f ≤ f_max`.
pub fn fit_fidelity_decay(trace: &FidelityTrace, window: FitWindow) -> Result<DecayFit> {
    let mut pts = Vec::new();
    for &(t, f) in trace.records.iter().filter(|r| r.0 > 0) {
        if f < window.f_min {
            break;
        }
        if f <= window.f_max {
            if !(f > 0.0) {
                return Err(Error::Fit(format!("f({t}) = {f} is not positive")));
            }
            pts.push((t as f64, -f.ln()));
        }
    }
    if pts.len() < 2 {
        return Err(Error::Fit(format!("only {} points inside the fit window", pts.len())));
    }
    let through_origin = |power: i32| {
        let sxx: f64 = pts.iter().map(|(t, _)| t.powi(2 * power)).sum();
        let sxy: f64 = pts.iter().map(|(t, y)| t.powi(power) * y).sum();
        let rate = sxy / sxx;
        let residual: f64 = pts.iter().map(|(t, y)| (y - rate * t.powi(power)).powi(2)).sum();
        (rate, residual)
    };
    let (a, ra) = through_origin(2);
    let (b, rb) = through_origin(1);
    let (model, rate) = if ra <= rb {
        (DecayModel::Gaussian, a)
    } else {
        (DecayModel::Exponential, b)
    };
    Ok(DecayFit {
        model,
        rate,
        gaussian_rate: a,
        exponential_rate: b,
        gaussian_residual: ra,
        exponential_residual: rb,
        points: pts.len(),
    })
}

/// Evolve `|n0⟩` with `circuit` under `mode` and record the fidelity against
/// the exact engine at every iteration. Stops early once `f < stop_below`.
#[allow(clippy::too_many_arguments)]
pub fn compute_fidelity_trace(
    params: &SawtoothParams,
    circuit: &Circuit,
    layout: &LatticeLayout,
    mode: &ErrorMode,
    t_max: usize,
    seed: u64,
    stop_below: Option<f64>,
) -> Result<FidelityTrace> {
    let mut ideal = init_momentum_eigenstate(params);
    let mut engine = ExactEngine::new(params);
    let mut actual = ideal.clone();
    let mut records = Vec::with_capacity(t_max + 1);
    let mut failure = None;
    run_imperfect_evolution(&mut actual, circuit, layout, mode, t_max, seed, |t, state| {
        if t > 0 {
            if let Err(e) = engine.step(&mut ideal) {
                failure = Some(e);
                return false;
            }
        }
        match fidelity(state, &ideal) {
            Ok(f) => {
                records.push((t, f));
                stop_below.is_none_or(|c| f >= c)
            }
            Err(e) => {
                failure = Some(e);
                false
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(FidelityTrace {
        records,
        n_qubits: params.n_qubits,
        epsilon: mode.epsilon(),
        mode: mode.tag().to_string(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_of(f: impl Fn(f64) -> f64, t_max: usize) -> FidelityTrace {
        let v: Vec<f64> = (0..=t_max).map(|t| f(t as f64)).collect();
        FidelityTrace::from_values(&v)
    }

    #[test]
    fn fidelity_basics() {
        let a = QuantumRegister::momentum_eigenstate(4, 1).unwrap();
        let b = QuantumRegister::momentum_eigenstate(4, 2).unwrap();
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        let mut c = a.clone();
        let ph = num_complex::Complex64::from_polar(1.0, 0.77);
        c.amplitudes_mut().iter_mut().for_each(|x| *x *= ph);
        assert!((fidelity(&a, &c).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_crossing_time() {
        let tr = trace_of(|t| (-0.01 * t * t).exp(), 10);
        let tf = fidelity_time(&tr, 0.9).unwrap();
        // log-linear interpolation between t = 3 and t = 4
        let expected = 3.0 + (0.9f64.ln() + 0.09) / (-0.16 + 0.09);
        assert!((tf - expected).abs() < 1e-12);
        let closed_form = (1.0f64 / 0.9).ln().sqrt() / 0.1;
        assert!((closed_form - 3.2459).abs() < 1e-4);
        assert!((tf - closed_form).abs() < 0.03);
    }

    #[test]
    fn never_crossing_is_infinite() {
        let tr = trace_of(|_| 1.0, 20);
        assert_eq!(fidelity_time(&tr, 0.9).unwrap(), f64::INFINITY);
        assert!(fidelity_time(&FidelityTrace::from_values(&[]), 0.9).is_err());
    }

    #[test]
    fn decay_model_selection() {
        let g = fit_fidelity_decay(&trace_of(|t| (-3.0 * t * t * 1e-4).exp(), 60), FitWindow::default()).unwrap();
        assert_eq!(g.model, DecayModel::Gaussian);
        assert!((g.rate - 3e-4).abs() < 1e-14);

        let e = fit_fidelity_decay(&trace_of(|t| (-0.02 * t).exp(), 60), FitWindow::default()).unwrap();
        assert_eq!(e.model, DecayModel::Exponential);
        assert!((e.rate - 0.02).abs() < 1e-14);

        let wide = FitWindow {
            f_min: 1e-15,
            f_max: 1.0,
        };
        let g = fit_fidelity_decay(&trace_of(|t| (-3.0 * t * t).exp(), 10), wide).unwrap();
        assert_eq!(g.model, DecayModel::Gaussian);
        assert!((g.rate - 3.0).abs() < 1e-10);
        let e = fit_fidelity_decay(&trace_of(|t| (-0.2 * t).exp(), 10), FitWindow::default()).unwrap();
        assert_eq!(e.model, DecayModel::Exponential);
        assert!((e.rate - 0.2).abs() < 1e-10);
    }

    #[test]
    fn decay_fit_needs_points() {
        let tr = trace_of(|t| if t == 0.0 { 1.0 } else { 0.1 }, 5);
        assert!(fit_fidelity_decay(&tr, FitWindow::default()).is_err());
        let zero = trace_of(|t| if t == 0.0 { 1.0 } else { 0.0 }, 5);
        assert!(fit_fidelity_decay(&zero, FitWindow { f_min: 0.0, f_max: 1.0 }).is_err());
    }
}
