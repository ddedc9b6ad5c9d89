use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsawtooth::harness::{emit_plot_data, run_experiment, Experiment, RunConfig};
use qsawtooth::Error;

#[derive(Parser)]
#[command(name = "qsawtooth", version, about = "Quantum sawtooth map experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-averaged Husimi grids with and without imperfections, plus the classical density.
    HusimiPanel(RunArgs),
    /// Fidelity curves for a family of imperfection strengths.
    FidelityTrace(RunArgs),
    /// Median fidelity time against epsilon and register size.
    TfScaling(RunArgs),
    /// Classical ensemble momentum spread and fitted exponents.
    ClassicalDiffusion(RunArgs),
    /// Routed gate circuit against the exact engine.
    OracleCheck(RunArgs),
    /// Write gnuplot scripts for a finished run directory.
    Plot {
        /// Directory holding manifest.json.
        dir: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// key = value configuration file.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Master seed, overriding the file.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR", env = "QSAWTOOTH_OUT")]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, value_name = "N", env = "QSAWTOOTH_JOBS")]
    jobs: Option<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter { .. } | Error::Config(_) | Error::Parse { .. } => 2,
        Error::Io { .. } => 3,
        Error::Invariant(_) => 4,
        Error::Manifest(_) => 5,
        _ => 1,
    }
}

fn run(experiment: Experiment, args: RunArgs) -> Result<(), Error> {
    let mut config = RunConfig::load(&args.config, Some(experiment))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = args.out {
        config.out_dir = out;
    }
    if let Some(jobs) = args.jobs {
        config.jobs = jobs;
    }
    config.validate()?;
    let manifest = run_experiment(&config)?;
    println!(
        "{}: {} files in {}",
        manifest.experiment,
        manifest.outputs.len() + 1,
        config.out_dir.display()
    );
    println!("{}", manifest.derived);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::HusimiPanel(a) => run(Experiment::HusimiPanel, a),
        Command::FidelityTrace(a) => run(Experiment::FidelityTrace, a),
        Command::TfScaling(a) => run(Experiment::TfScaling, a),
        Command::ClassicalDiffusion(a) => run(Experiment::ClassicalDiffusion, a),
        Command::OracleCheck(a) => run(Experiment::OracleCheck, a),
        Command::Plot { dir } => emit_plot_data(&dir).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsawtooth: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
