//! Preset execution and on-disk results.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{scaled_epsilon, Experiment, RunConfig};
use crate::analysis::{
    compute_fidelity_trace, fidelity_time, fit_fidelity_decay, quantum_second_moment_periodic, scaling_exponent,
    FitWindow, HusimiAccumulator, HusimiGrid,
};
use crate::circuit::{build_map_circuit, route, Circuit, LatticeLayout, RoutingReport};
use crate::classical::{
    classical_phase_density, evolve_ensemble, fit_diffusion_coefficient, fit_power_law, EnsembleConfig,
};
use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::hardware::{run_imperfect_evolution, ErrorMode};
use crate::rng::split_seed;
use crate::state::{init_momentum_eigenstate, ExactEngine, SawtoothParams};

/// Largest tolerated infidelity between routed circuit and exact engine.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

const MANIFEST: &str = "manifest.json";
const CONFIG: &str = "config.txt";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub file: String,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    Lines,
    LogLog,
    SemilogY,
    Image,
}

/// One curve: columns are 1-based as in gnuplot. `filter` keeps rows whose
/// column equals the value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub x: usize,
    pub y: usize,
    pub label: String,
    #[serde(default)]
    pub filter: Option<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub name: String,
    pub kind: PlotKind,
    pub data: String,
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    #[serde(default)]
    pub series: Vec<Series>,
    /// Log-log guide lines to draw through the first series.
    #[serde(default)]
    pub reference_slopes: Vec<f64>,
    /// Axis sidecar for images.
    #[serde(default)]
    pub meta: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub config_file: String,
    pub outputs: Vec<OutputEntry>,
    pub plots: Vec<PlotSpec>,
    pub derived: Value,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))
    }
}

struct Sink {
    dir: PathBuf,
    outputs: Vec<OutputEntry>,
    plots: Vec<PlotSpec>,
}

impl Sink {
    fn text(&mut self, name: &str, contents: &str, description: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.record(name, description);
        Ok(())
    }

    fn grid(&mut self, stem: &str, grid: &PhaseGrid, meta: &str, description: &str) -> Result<()> {
        grid.write_text(&self.dir.join(format!("{stem}.txt")))?;
        self.record(&format!("{stem}.txt"), description);
        grid.write_pgm(&self.dir.join(format!("{stem}.pgm")))?;
        self.record(&format!("{stem}.pgm"), "graymap of the same grid, top row = highest p");
        self.text(&format!("{stem}.meta"), meta, "axis metadata for the grid")?;
        self.plots.push(PlotSpec {
            name: stem.to_string(),
            kind: PlotKind::Image,
            data: format!("{stem}.txt"),
            title: description.to_string(),
            xlabel: "theta".into(),
            ylabel: "p".into(),
            series: Vec::new(),
            reference_slopes: Vec::new(),
            meta: Some(format!("{stem}.meta")),
        });
        Ok(())
    }

    fn record(&mut self, file: &str, description: &str) {
        self.outputs.push(OutputEntry {
            file: file.to_string(),
            description: description.to_string(),
        });
    }
}

/// Run a preset, writing all outputs and `manifest.json` into
/// `config.out_dir`. Work is spread over `config.jobs` threads; results
/// are assembled in parameter order so outputs do not depend on it.
pub fn run_experiment(config: &RunConfig) -> Result<Manifest> {
    config.validate()?;
    let dir = config.out_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} worker threads: {e}", config.jobs)))?;
    let mut sink = Sink {
        dir: dir.clone(),
        outputs: Vec::new(),
        plots: Vec::new(),
    };
    sink.text(
        CONFIG,
        &config.to_text(),
        "effective configuration; rerun with --config",
    )?;
    let derived = pool.install(|| match config.experiment {
        Experiment::OracleCheck => oracle_check(config, &mut sink),
        Experiment::FidelityTrace => fidelity_family(config, &mut sink),
        Experiment::TfScaling => tf_scaling(config, &mut sink),
        Experiment::HusimiPanel => husimi_panel(config, &mut sink),
        Experiment::ClassicalDiffusion => classical_diffusion(config, &mut sink),
    })?;
    let manifest = Manifest {
        experiment: config.experiment.to_string(),
        seed: config.seed,
        config_file: CONFIG.into(),
        outputs: sink.outputs,
        plots: sink.plots,
        derived,
    };
    let path = dir.join(MANIFEST);
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Manifest(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    if let Some(msg) = manifest.derived.get("invariant_violation").and_then(Value::as_str) {
        return Err(Error::Invariant(msg.to_string()));
    }
    Ok(manifest)
}

fn params_for(config: &RunConfig, n: usize) -> Result<SawtoothParams> {
    match config.n0 {
        Some(n0) => SawtoothParams::new(n, config.chaos, n0),
        None => SawtoothParams::with_default_n0(n, config.chaos),
    }
}

fn routed_circuit(params: &SawtoothParams) -> Result<(Circuit, LatticeLayout, RoutingReport)> {
    let layout = LatticeLayout::for_qubits(params.n_qubits);
    let (circuit, report) = route(&build_map_circuit(params), &layout)?;
    Ok((circuit, layout, report))
}

/// Middle value, averaging the two central ones for even lengths.
/// Infinite entries (no threshold crossing) sort last.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn oracle_check(config: &RunConfig, sink: &mut Sink) -> Result<Value> {
    let rows: Vec<(usize, usize, usize, usize, f64)> = config
        .n_qubits
        .par_iter()
        .map(|&n| {
            let params = params_for(config, n)?;
            let (circuit, layout, report) = routed_circuit(&params)?;
            let trace = compute_fidelity_trace(
                &params,
                &circuit,
                &layout,
                &ErrorMode::Ideal,
                config.iterations,
                0,
                None,
            )?;
            let worst = trace.records.iter().map(|r| (1.0 - r.1).abs()).fold(0.0, f64::max);
            Ok((
                n,
                build_map_circuit(&params).gate_count(),
                circuit.gate_count(),
                report.swaps_inserted,
                worst,
            ))
        })
        .collect::<Result<_>>()?;
    let mut csv = String::from("n_qubits,gates,routed_gates,swaps,max_infidelity\n");
    for (n, g, rg, s, w) in &rows {
        writeln!(csv, "{n},{g},{rg},{s},{w:e}").unwrap();
    }
    sink.text(
        "oracle.csv",
        &csv,
        "routed circuit vs exact engine, worst infidelity per size",
    )?;
    sink.plots.push(PlotSpec {
        name: "oracle".into(),
        kind: PlotKind::Lines,
        data: "oracle.csv".into(),
        title: "worst infidelity vs exact engine".into(),
        xlabel: "n_q".into(),
        ylabel: "1 - f".into(),
        series: vec![Series {
            x: 1,
            y: 5,
            label: "max infidelity".into(),
            filter: None,
        }],
        reference_slopes: Vec::new(),
        meta: None,
    });
    let max = rows.iter().map(|r| r.4).fold(0.0, f64::max);
    let mut derived = json!({
        "max_infidelity": max,
        "tolerance": ORACLE_TOLERANCE,
        "iterations": config.iterations,
        "sizes": rows.iter().map(|r| json!({"n_qubits": r.0, "gates": r.1, "routed_gates": r.2, "swaps": r.3, "max_infidelity": r.4})).collect::<Vec<_>>(),
    });
    if !(max < ORACLE_TOLERANCE) {
        derived["invariant_violation"] = json!(format!("routed evolution deviates from the exact engine: {max:e}"));
    }
    Ok(derived)
}

fn mode_label(mode: &ErrorMode, ratio: f64) -> String {
    match mode {
        ErrorMode::Static { .. } => format!("static-J{ratio}"),
        other => other.tag().to_string(),
    }
}

fn fidelity_family(config: &RunConfig, sink: &mut Sink) -> Result<Value> {
    let window = FitWindow {
        f_min: config.fit_f_min,
        f_max: config.fit_f_max,
    };
    let mut summary = String::from(
        "n_qubits,mode,coupling_ratio,epsilon,realization,seed,t_f,model,rate,gaussian_residual,exponential_residual\n",
    );
    let mut derived = Vec::new();
    for &n in &config.n_qubits {
        let params = params_for(config, n)?;
        let (circuit, layout, _) = routed_circuit(&params)?;
        for ratio in config.coupling_ratios() {
            let label = mode_label(&config.mode_for(1.0, ratio), ratio);
            let jobs: Vec<(usize, usize)> = (0..config.realizations)
                .flat_map(|r| (0..config.epsilon.len()).map(move |e| (r, e)))
                .collect();
            let traces = jobs
                .par_iter()
                .map(|&(r, e)| {
                    let seed = split_seed(config.seed, r as u64);
                    let mode = config.mode_for(config.epsilon[e], ratio);
                    compute_fidelity_trace(&params, &circuit, &layout, &mode, config.iterations, seed, None)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut csv = String::from("realization,t");
            for e in &config.epsilon {
                write!(csv, ",f_eps{e:e}").unwrap();
            }
            csv.push('\n');
            for r in 0..config.realizations {
                let row = &traces[r * config.epsilon.len()..(r + 1) * config.epsilon.len()];
                for t in 0..=config.iterations {
                    write!(csv, "{r},{t}").unwrap();
                    for tr in row {
                        write!(csv, ",{:.17e}", tr.records[t].1).unwrap();
                    }
                    csv.push('\n');
                }
            }
            for (&(r, e), tr) in jobs.iter().zip(&traces) {
                let tf = fidelity_time(tr, config.fidelity_threshold)?;
                let fit = fit_fidelity_decay(tr, window).ok();
                let (model, rate, rg, re) = fit.map_or(("none".to_string(), f64::NAN, f64::NAN, f64::NAN), |f| {
                    (
                        format!("{:?}", f.model).to_lowercase(),
                        f.rate,
                        f.gaussian_residual,
                        f.exponential_residual,
                    )
                });
                writeln!(
                    summary,
                    "{n},{label},{ratio:?},{:e},{r},{},{tf},{model},{rate:e},{rg:e},{re:e}",
                    config.epsilon[e], tr.seed
                )
                .unwrap();
                derived.push(json!({
                    "n_qubits": n, "mode": label, "coupling_ratio": ratio, "epsilon": config.epsilon[e],
                    "realization": r, "seed": tr.seed, "t_f": tf, "model": model, "rate": rate,
                }));
            }
            let name = format!("fidelity_n{n}_{label}");
            sink.text(&format!("{name}.csv"), &csv, "fidelity f(t), one column per epsilon")?;
            sink.plots.push(PlotSpec {
                name: name.clone(),
                kind: PlotKind::Lines,
                data: format!("{name}.csv"),
                title: format!("fidelity, n_q = {n}, {label}"),
                xlabel: "t".into(),
                ylabel: "f".into(),
                series: config
                    .epsilon
                    .iter()
                    .enumerate()
                    .map(|(i, e)| Series {
                        x: 2,
                        y: 3 + i,
                        label: format!("eps = {e:e}"),
                        filter: Some((1, 0.0)),
                    })
                    .collect(),
                reference_slopes: Vec::new(),
                meta: None,
            });
        }
    }
    sink.text(
        "fidelity_summary.csv",
        &summary,
        "fidelity time and decay-law fit per curve",
    )?;
    Ok(json!({ "curves": derived, "threshold": config.fidelity_threshold }))
}

fn tf_scaling(config: &RunConfig, sink: &mut Sink) -> Result<Value> {
    let mut raw = String::from("n_qubits,mode,coupling_ratio,epsilon,realization,seed,t_f\n");
    let mut med = String::from("n_qubits,mode,coupling_ratio,epsilon,median_t_f,min_t_f,max_t_f,realizations\n");
    // (n, ratio, label, eps, median)
    let mut points: Vec<(usize, f64, String, f64, f64)> = Vec::new();
    for &n in &config.n_qubits {
        let params = params_for(config, n)?;
        let (circuit, layout, _) = routed_circuit(&params)?;
        for ratio in config.coupling_ratios() {
            for &eps in &config.epsilon {
                let mode = config.mode_for(eps, ratio);
                let label = mode_label(&mode, ratio);
                let tfs = (0..config.realizations)
                    .into_par_iter()
                    .map(|r| {
                        let seed = split_seed(config.seed, r as u64);
                        let tr = compute_fidelity_trace(
                            &params,
                            &circuit,
                            &layout,
                            &mode,
                            config.iterations,
                            seed,
                            Some(config.fidelity_threshold),
                        )?;
                        Ok((seed, fidelity_time(&tr, config.fidelity_threshold)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                for (r, (seed, tf)) in tfs.iter().enumerate() {
                    writeln!(raw, "{n},{label},{ratio:?},{eps:e},{r},{seed},{tf}").unwrap();
                }
                let values: Vec<f64> = tfs.iter().map(|x| x.1).collect();
                let m = median(&values);
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                writeln!(med, "{n},{label},{ratio:?},{eps:e},{m},{lo},{hi},{}", values.len()).unwrap();
                points.push((n, ratio, label, eps, m));
            }
        }
    }
    sink.text("tf_realizations.csv", &raw, "fidelity time per realization")?;
    sink.text("tf_median.csv", &med, "median fidelity time per parameter point")?;

    let mut eps_slopes = Vec::new();
    let mut n_exponents = Vec::new();
    let mut series_files = Vec::new();
    for &n in &config.n_qubits {
        for ratio in config.coupling_ratios() {
            let pts: Vec<&(usize, f64, String, f64, f64)> =
                points.iter().filter(|p| p.0 == n && p.1 == ratio).collect();
            let label = pts.first().map(|p| p.2.clone()).unwrap_or_default();
            let xy: Vec<(f64, f64)> = pts.iter().filter(|p| p.4.is_finite()).map(|p| (p.3, p.4)).collect();
            let slope = scaling_exponent(&xy).ok();
            eps_slopes.push(json!({"n_qubits": n, "mode": label, "coupling_ratio": ratio,
                "slope": slope.map(|s| s.slope), "stderr": slope.map(|s| s.slope_stderr), "points": xy.len()}));
            if config.epsilon.len() > 1 {
                let name = format!("tf_vs_eps_n{n}_{label}");
                let mut csv = String::from("epsilon,median_t_f\n");
                for p in &pts {
                    writeln!(csv, "{:e},{}", p.3, p.4).unwrap();
                }
                series_files.push((name, csv, format!("t_f vs epsilon, n_q = {n}, {label}"), "epsilon"));
            }
        }
    }
    if config.n_qubits.len() > 1 {
        for ratio in config.coupling_ratios() {
            for &eps in &config.epsilon {
                let pts: Vec<&(usize, f64, String, f64, f64)> =
                    points.iter().filter(|p| p.1 == ratio && p.3 == eps).collect();
                let label = pts.first().map(|p| p.2.clone()).unwrap_or_default();
                let xy: Vec<(f64, f64)> = pts
                    .iter()
                    .filter(|p| p.4.is_finite())
                    .map(|p| (p.0 as f64, p.4))
                    .collect();
                let fit = scaling_exponent(&xy).ok();
                n_exponents.push(json!({"epsilon": eps, "mode": label, "coupling_ratio": ratio,
                    "exponent": fit.map(|s| s.slope), "stderr": fit.map(|s| s.slope_stderr), "points": xy.len()}));
                let name = format!("tf_vs_nq_eps{eps:e}_{label}");
                let mut csv = String::from("n_qubits,median_t_f\n");
                for p in &pts {
                    writeln!(csv, "{},{}", p.0, p.4).unwrap();
                }
                series_files.push((name, csv, format!("t_f vs n_q, eps = {eps:e}, {label}"), "n_q"));
            }
        }
    }
    for (name, csv, title, xlabel) in series_files {
        sink.text(&format!("{name}.csv"), &csv, &title)?;
        sink.plots.push(PlotSpec {
            name: name.clone(),
            kind: PlotKind::LogLog,
            data: format!("{name}.csv"),
            title,
            xlabel: xlabel.into(),
            ylabel: "t_f".into(),
            series: vec![Series {
                x: 1,
                y: 2,
                label: "median t_f".into(),
                filter: None,
            }],
            reference_slopes: if xlabel == "epsilon" {
                vec![-1.0, -2.0]
            } else {
                Vec::new()
            },
            meta: None,
        });
    }
    Ok(json!({
        "threshold": config.fidelity_threshold,
        "realizations": config.realizations,
        "medians": points.iter().map(|p| json!({"n_qubits": p.0, "coupling_ratio": p.1, "mode": p.2, "epsilon": p.3, "median_t_f": p.4})).collect::<Vec<_>>(),
        "epsilon_slopes": eps_slopes,
        "n_qubit_exponents": n_exponents,
    }))
}

fn grid_meta(grid: &PhaseGrid, extra: &[(&str, String)]) -> String {
    let mut s = format!(
        "n_theta = {}\nn_p = {}\ntheta_min = 0\ntheta_max = {TAU:?}\np_min = {:?}\np_max = {PI:?}\n\
         horizontal = theta\nvertical = p\nrow_order = lowest p first\nsample = cell lower-left corner\n",
        grid.n_theta, grid.n_p, -PI
    );
    for (k, v) in extra {
        writeln!(s, "{k} = {v}").unwrap();
    }
    s
}

/// Share of probability that the imperfect run puts where the perfect one
/// is below 1% of its peak.
pub const LOW_DENSITY_FRACTION: f64 = 0.01;

fn husimi_panel(config: &RunConfig, sink: &mut Sink) -> Result<Value> {
    let mut panels = Vec::new();
    let ratio = config.coupling_ratios()[0];
    for (i, &n) in config.n_qubits.iter().enumerate() {
        let params = params_for(config, n)?;
        let eps = config.epsilon.get(i).copied().unwrap_or_else(|| scaled_epsilon(n));
        let (circuit, layout, _) = routed_circuit(&params)?;
        let mode = config.mode_for(eps, ratio);
        let window = (config.average_from, config.iterations);
        let runs: Vec<Result<(HusimiGrid, f64)>> = [None, Some(mode)]
            .into_par_iter()
            .map(|mode| {
                let mut acc = HusimiAccumulator::new(config.grid, config.grid, config.husimi_s);
                let mut m2 = 0.0;
                let mut frames = 0usize;
                let mut reg = init_momentum_eigenstate(&params);
                let mut observe = |t: usize, st: &crate::state::QuantumRegister| -> Result<()> {
                    if t >= window.0 && t <= window.1 {
                        acc.add(st)?;
                        m2 += quantum_second_moment_periodic(st, params.p0())?;
                        frames += 1;
                    }
                    Ok(())
                };
                match mode {
                    None => {
                        let mut engine = ExactEngine::new(&params);
                        observe(0, &reg)?;
                        for t in 1..=config.iterations {
                            engine.step(&mut reg)?;
                            observe(t, &reg)?;
                        }
                    }
                    Some(mode) => {
                        let seed = split_seed(config.seed, 0);
                        let mut failure = None;
                        run_imperfect_evolution(
                            &mut reg,
                            &circuit,
                            &layout,
                            &mode,
                            config.iterations,
                            seed,
                            |t, st| match observe(t, st) {
                                Ok(()) => true,
                                Err(e) => {
                                    failure = Some(e);
                                    false
                                }
                            },
                        )?;
                        if let Some(e) = failure {
                            return Err(e);
                        }
                    }
                }
                let grid = acc
                    .mean()
                    .ok_or_else(|| Error::invalid("average_from", "no frames in the window"))?;
                Ok((grid, m2 / frames as f64))
            })
            .collect();
        let mut runs = runs.into_iter();
        let (perfect, m2_perfect) = runs.next().unwrap()?;
        let (noisy, m2_noisy) = runs.next().unwrap()?;
        let low_perfect = perfect.mass_where_reference_below(&perfect, LOW_DENSITY_FRACTION)?;
        let low_noisy = noisy.mass_where_reference_below(&perfect, LOW_DENSITY_FRACTION)?;
        for (tag, g, e) in [("perfect", &perfect, 0.0), ("imperfect", &noisy, eps)] {
            let meta = grid_meta(
                &g.grid,
                &[
                    ("n_qubits", n.to_string()),
                    ("epsilon", format!("{e:e}")),
                    ("coupling_ratio", format!("{ratio:?}")),
                    ("t_from", window.0.to_string()),
                    ("t_to", window.1.to_string()),
                    ("s", format!("{:?}", config.husimi_s)),
                    ("values", "Husimi density, values times cell area sum to 1".into()),
                ],
            );
            sink.grid(
                &format!("husimi_n{n}_{tag}"),
                &g.grid,
                &meta,
                &format!("Husimi average, n_q = {n}, eps = {e:e}"),
            )?;
        }
        panels.push(json!({
            "n_qubits": n, "epsilon": eps, "coupling_ratio": ratio,
            "mass_near_p0_perfect": perfect.mass_near_momentum(params.p0(), 1.0),
            "mass_near_p0_imperfect": noisy.mass_near_momentum(params.p0(), 1.0),
            "low_density_mass_perfect": low_perfect,
            "low_density_mass_imperfect": low_noisy,
            "low_density_ratio": low_noisy / low_perfect,
            "periodic_second_moment_perfect": m2_perfect,
            "periodic_second_moment_imperfect": m2_noisy,
        }));
    }
    let mut classical = Value::Null;
    if config.trajectories > 0 {
        let p0 = 0.38 * TAU;
        let mut out = Vec::new();
        for (tag, noise) in [("classical", 0.0), ("classical_noisy", config.classical_noise)] {
            let cfg = EnsembleConfig::new(config.trajectories, p0, config.chaos, config.iterations, config.seed)
                .with_noise(noise);
            let mut grid =
                classical_phase_density(&cfg, config.grid, config.grid, config.average_from, config.iterations)?;
            let area = grid.cell_area();
            grid.scale(1.0 / area);
            let meta = grid_meta(
                &grid,
                &[
                    ("trajectories", config.trajectories.to_string()),
                    ("noise", format!("{noise:e}")),
                    ("t_from", config.average_from.to_string()),
                    ("t_to", config.iterations.to_string()),
                    ("values", "histogram density, values times cell area sum to 1".into()),
                ],
            );
            sink.grid(tag, &grid, &meta, &format!("classical density, noise = {noise:e}"))?;
            out.push(json!({"panel": tag, "noise": noise}));
        }
        classical = json!(out);
    }
    Ok(json!({ "panels": panels, "classical": classical, "low_density_fraction": LOW_DENSITY_FRACTION }))
}

/// Reference diffusion coefficient for `K > 0`: random-phase value above
/// `K = 1`, the cantori-limited law below.
pub fn reference_diffusion(k: f64) -> Option<f64> {
    if k > 1.0 {
        Some(PI * PI / 3.0 * k * k)
    } else if k > 0.0 {
        Some(3.3 * k.powf(2.5))
    } else {
        None
    }
}

fn classical_diffusion(config: &RunConfig, sink: &mut Sink) -> Result<Value> {
    let p0 = 0.38 * TAU;
    let mut summary = String::from("K,trajectories,noise,alpha,prefactor,D,reference_D\n");
    let mut derived = Vec::new();
    for (i, &k) in config.classical_kicks.iter().enumerate() {
        let cfg = EnsembleConfig::new(
            config.trajectories,
            p0,
            k,
            config.iterations,
            split_seed(config.seed, i as u64),
        )
        .with_noise(config.classical_noise);
        let m = evolve_ensemble(&cfg)?;
        let t_hi = config.fit_t_max.min(config.iterations);
        let (alpha, pref) = fit_power_law(&m, config.fit_t_min, t_hi).unwrap_or((f64::NAN, f64::NAN));
        let d = fit_diffusion_coefficient(&m, config.fit_t_min, t_hi)?;
        let reference = reference_diffusion(k);
        // α on the two log-halves of the window, as a sensitivity check
        let mid = ((config.fit_t_min as f64 * t_hi as f64).sqrt().round() as usize).clamp(config.fit_t_min, t_hi);
        let halves: Vec<Value> = [(config.fit_t_min, mid), (mid, t_hi)]
            .iter()
            .filter_map(|&(lo, hi)| {
                fit_power_law(&m, lo, hi)
                    .ok()
                    .map(|(a, _)| json!({"t_min": lo, "t_max": hi, "alpha": a}))
            })
            .collect();
        writeln!(
            summary,
            "{k:?},{},{:e},{alpha},{pref},{d},{}",
            config.trajectories,
            config.classical_noise,
            reference.map_or("nan".into(), |r| r.to_string())
        )
        .unwrap();
        let name = format!("diffusion_K{k}");
        sink.text(
            &format!("{name}.csv"),
            &m.to_csv(),
            &format!("ensemble <(dp)^2>(t), K = {k}"),
        )?;
        sink.plots.push(PlotSpec {
            name: name.clone(),
            kind: PlotKind::LogLog,
            data: format!("{name}.csv"),
            title: format!("momentum spread, K = {k}"),
            xlabel: "t".into(),
            ylabel: "<(dp)^2>".into(),
            series: vec![Series {
                x: 1,
                y: 2,
                label: format!("K = {k}"),
                filter: None,
            }],
            reference_slopes: vec![1.0],
            meta: None,
        });
        derived.push(json!({"K": k, "seed": cfg.seed, "alpha": alpha, "prefactor": pref, "D": d, "reference_D": reference, "alpha_windows": halves}));
    }
    sink.text("diffusion.csv", &summary, "fitted exponents and diffusion coefficients")?;
    Ok(json!({ "p0": p0, "fit_window": [config.fit_t_min, config.fit_t_max], "runs": derived }))
}
