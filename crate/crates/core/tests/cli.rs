use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qsawtooth::harness::Manifest;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qsawtooth"));
    c.env_remove("QSAWTOOTH_OUT").env_remove("QSAWTOOTH_JOBS");
    c
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CLASSICAL: &str = "# small ensemble\ntrajectories = 2000\niterations = 100\nfit_t_min = 10\nfit_t_max = 100\n";

#[test]
fn oracle_check_writes_manifest() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "o.cfg", "n_qubits = 2, 3, 4\niterations = 10\n");
    let out = dir.path().join("run");
    let o = run(&["oracle-check"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = Manifest::load(&out.join("manifest.json")).unwrap();
    assert_eq!(m.experiment, "oracle-check");
    assert!(out.join("oracle.csv").exists());
    assert!(out.join("config.txt").exists());
    let csv = fs::read_to_string(out.join("oracle.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", CLASSICAL);
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (out, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        let o = run(&["classical-diffusion", "--seed", seed], &cfg, out);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let read = |d: &Path| fs::read(d.join("diffusion_K2.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(Manifest::load(&a.join("manifest.json")).unwrap().seed, 7);
}

#[test]
fn fidelity_trace_is_reproducible_across_job_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "f.cfg",
        "n_qubits = 4\niterations = 30\nrealizations = 3\nepsilon = 1e-3, 3e-3\n",
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run(&["fidelity-trace", "--jobs", "1"], &cfg, &a).status.success());
    assert!(run(&["fidelity-trace", "--jobs", "3"], &cfg, &b).status.success());
    let files: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|n| n.to_string_lossy().ends_with(".csv"))
        .collect();
    assert!(files.len() >= 2);
    for f in files {
        assert_eq!(fs::read(a.join(&f)).unwrap(), fs::read(b.join(&f)).unwrap(), "{f:?}");
    }
}

#[test]
fn environment_sets_output_and_flag_wins() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "o.cfg", "n_qubits = 2\niterations = 5\n");
    let env_out = dir.path().join("from_env");
    let o = bin()
        .args(["oracle-check", "--config"])
        .arg(&cfg)
        .env("QSAWTOOTH_OUT", &env_out)
        .env("QSAWTOOTH_JOBS", "2")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(env_out.join("manifest.json").exists());
    let text = fs::read_to_string(env_out.join("config.txt")).unwrap();
    assert!(text.contains("jobs = 2"));

    let flag_out = dir.path().join("from_flag");
    let o = bin()
        .args(["oracle-check", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&flag_out)
        .env("QSAWTOOTH_OUT", dir.path().join("ignored"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(flag_out.join("manifest.json").exists());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn environment_cannot_set_other_keys() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "o.cfg", "n_qubits = 2\niterations = 5\nseed = 3\n");
    let out = dir.path().join("run");
    let o = bin()
        .args(["oracle-check", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .env("QSAWTOOTH_SEED", "99")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(Manifest::load(&out.join("manifest.json")).unwrap().seed, 3);
}

#[test]
fn bad_configs_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    for (name, text) in [
        ("unknown.cfg", "n_qubits = 4\nwobble = 1\n"),
        ("syntax.cfg", "n_qubits 4\n"),
        ("value.cfg", "n_qubits = 0\n"),
        ("other.cfg", "experiment = tf-scaling\n"),
    ] {
        let cfg = write_config(dir.path(), name, text);
        let o = run(&["oracle-check"], &cfg, &out);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("qsawtooth:"));
    }
    let o = run(
        &["oracle-check"],
        &write_config(dir.path(), "l.cfg", "\n\nwobble = 1\n"),
        &out,
    );
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn missing_config_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let o = run(&["oracle-check"], &dir.path().join("nope.cfg"), &dir.path().join("run"));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn plot_writes_gnuplot_scripts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", CLASSICAL);
    let out = dir.path().join("run");
    assert!(run(&["classical-diffusion"], &cfg, &out).status.success());
    let o = bin().arg("plot").arg(&out).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let listed = String::from_utf8(o.stdout).unwrap();
    let scripts: Vec<&str> = listed.lines().filter(|l| l.ends_with(".gp")).collect();
    assert!(!scripts.is_empty());
    for s in scripts {
        let text = fs::read_to_string(s).unwrap();
        assert!(text.contains("plot"), "{s}");
    }
}

#[test]
fn plot_without_manifest_fails() {
    let dir = TempDir::new().unwrap();
    let o = bin().arg("plot").arg(dir.path()).output().unwrap();
    assert!(!o.status.success());
}

#[test]
fn husimi_panel_small_run() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "h.cfg",
        "n_qubits = 4\nepsilon = 1e-3\niterations = 20\naverage_from = 10\ngrid = 16\ntrajectories = 1000\n",
    );
    let out = dir.path().join("run");
    let o = run(&["husimi-panel"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = Manifest::load(&out.join("manifest.json")).unwrap();
    for entry in &m.outputs {
        assert!(out.join(&entry.file).exists(), "{}", entry.file);
    }
    assert!(m.derived["panels"][0]["low_density_ratio"].is_number());
}

#[test]
fn tf_scaling_small_run() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "t.cfg",
        "n_qubits = 4, 5, 6\nepsilon = 1e-3, 3e-3, 1e-2\nrealizations = 2\niterations = 3000\n",
    );
    let out = dir.path().join("run");
    let o = run(&["tf-scaling"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = Manifest::load(&out.join("manifest.json")).unwrap();
    assert!(m.derived["epsilon_slopes"].is_array());
    assert!(out.join("tf_median.csv").exists());
}

#[test]
fn documented_tf_config_parses() {
    let text = "n_qubits = 9\nepsilon = 3e-6, 1e-5, 3e-5, 1e-4\ncoupling_ratio = 0, 1\nerror_mode = static\n\
                realizations = 20\niterations = 20000\n";
    let c = qsawtooth::harness::RunConfig::parse(text, Some(qsawtooth::harness::Experiment::TfScaling)).unwrap();
    assert_eq!(c.epsilon.len(), 4);
    assert_eq!(c.coupling_ratios(), vec![0.0, 1.0]);
}
