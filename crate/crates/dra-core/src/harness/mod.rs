//! Experiment harness: configuration, synthetic data generation, feature
//! CSV ingestion, the repeated-random-split protocol (mean recognition rate
//! plus standard error over R repetitions) and report emission.

mod config;
mod experiment;
mod io;
mod report;
mod synth;

pub use config::{
    DatasetSource, ExperimentConfig, Method, RegKind, ResolvedConfig, SplitCounts, TChoice,
    DEFAULT_MU_PE, DEFAULT_MU_TE, DEFAULT_RHO,
};
pub use experiment::run_experiment;
pub use io::{load_dataset, save_dataset, LoadedDataset};
pub use report::{emit_report, mean_and_ste, ExperimentReport, ReportFormat};
pub use synth::{synth_generate, SynthConfig};
