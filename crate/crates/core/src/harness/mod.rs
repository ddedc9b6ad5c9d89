//! Run configuration, preset execution and plot scripts.

pub mod config;
pub mod experiment;
pub mod plot;

pub use config::{scaled_epsilon, Experiment, ModeKind, RunConfig};
pub use experiment::{
    median, reference_diffusion, run_experiment, Manifest, PlotKind, PlotSpec, Series, ORACLE_TOLERANCE,
};
pub use plot::emit_plot_data;
