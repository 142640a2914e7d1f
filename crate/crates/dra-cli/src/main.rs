//! `dra` — experiment runner and classifier front-end.
//!
//! Subcommands: `synth` writes a synthetic feature CSV, `run` executes a
//! configured experiment, `classify` predicts the label of a probe set
//! against a training directory, and `report` re-aggregates raw repetition
//! reports into one summary.
//!
//! Exit codes: 0 success, 2 config/parse error, 3 numerical failure,
//! 4 I/O error.

use clap::{Args, Parser, Subcommand};
use dra_core::dra::dra_train;
use dra_core::harness::{
    emit_report, load_dataset, mean_and_ste, run_experiment, save_dataset, synth_generate,
    ExperimentConfig, ExperimentReport, Method, ReportFormat, SynthConfig,
};
use dra_core::residual::{class_distances, classify_ratio, classify_related_only};
use dra_core::setcore::{Dataset, ImageSet, UnrelatedStrategy};
use dra_core::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dra", version, about = "Image-set classification by discriminant residual analysis")]
struct Cli {
    /// Worker threads for parallel sections (0 = auto).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic feature CSV from a generator config.
    Synth(SynthArgs),
    /// Run a configured experiment and emit its report.
    Run(RunArgs),
    /// Classify one probe CSV against a training directory.
    Classify(ClassifyArgs),
    /// Re-aggregate raw repetition reports into a single summary.
    Report(ReportArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Generator config (JSON mirroring the synth dataset block).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Override the generator seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Report path; omitted means stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, default_value = "json")]
    format: String,
    /// Override the experiment seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Directory holding train.csv (and valid.csv for projected methods).
    #[arg(long)]
    train: PathBuf,
    /// Probe CSV; all rows form one probe set, class ids are ignored.
    #[arg(long)]
    probe: PathBuf,
    /// Method name, e.g. NFS or DRA-PE-eig.
    #[arg(long, default_value = "NFS")]
    method: String,
    /// Ridge weight.
    #[arg(long, default_value_t = 1e-2)]
    rho: f64,
    /// Eigen-regularization weight (defaults per scatter model).
    #[arg(long)]
    mu: Option<f64>,
    /// Projection dimension (defaults to the class count).
    #[arg(long)]
    t: Option<usize>,
    /// Write the prediction as JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Raw per-run report JSON files, aggregated in argument order.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output path; omitted means stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, default_value = "json")]
    format: String,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let body = std::fs::read_to_string(path)?;
    serde_json::from_str(&body)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn write_or_print(body: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, format!("{body}\n"))?;
            Ok(())
        }
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let mut cfg: SynthConfig = read_json(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let pools = synth_generate(&cfg)?;
    save_dataset(&args.out, &pools)
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let format: ReportFormat = args.format.parse()?;
    let mut cfg: ExperimentConfig = read_json(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let report = run_experiment(&cfg)?;
    match (&args.out, format) {
        (Some(path), _) => emit_report(&report, format, path),
        (None, ReportFormat::Json) => write_or_print(&report.to_json(), None),
        (None, ReportFormat::Csv) => write_or_print(report.to_csv().trim_end(), None),
    }
}

/// One training set per class: every sample of a class, in file order.
fn class_sets(path: &Path) -> Result<(Dataset, Vec<u64>)> {
    let loaded = load_dataset(path)?;
    let sets = loaded
        .pools
        .iter()
        .enumerate()
        .map(|(k, pool)| ImageSet::from_cols(k, pool))
        .collect();
    Ok((Dataset::new(sets)?, loaded.class_labels))
}

fn cmd_classify(args: &ClassifyArgs) -> Result<()> {
    let method = Method::parse(&args.method)?;
    let (train, labels) = class_sets(&args.train.join("train.csv"))?;
    let loaded_probe = load_dataset(&args.probe)?;
    let probe_cols: Vec<Vec<f64>> = loaded_probe.pools.into_iter().flatten().collect();
    let probe = ImageSet::from_cols(0, &probe_cols);

    let strategy = match method {
        Method::EuclidBaseline => UnrelatedStrategy::EuclidSelect(None),
        _ => UnrelatedStrategy::Nfs,
    };
    let (index, ratios) = match method {
        Method::Dra { model, pca, .. } => {
            if pca {
                return Err(Error::Config(
                    "classify does not support the PCA-reduced pipeline".into(),
                ));
            }
            let (valid, _) = class_sets(&args.train.join("valid.csv"))?;
            let reg = match method {
                Method::Dra {
                    reg: dra_core::harness::RegKind::Eig,
                    ..
                } => dra_core::dra::Regularization::Eig {
                    mu: args
                        .mu
                        .or_else(|| method.default_mu())
                        .expect("DRA methods have a default mu"),
                },
                _ => dra_core::dra::Regularization::Exp,
            };
            let t = args.t.unwrap_or(train.c).min(train.d);
            let proj = dra_train(&train, &valid, model, reg, strategy, args.rho, t)?;
            dra_core::dra::project_classify(&proj, &train, &probe, strategy, args.rho)?
        }
        _ => {
            let dists = class_distances(&train, &probe, strategy, args.rho)?;
            let label = match method {
                Method::DlrcBaseline => classify_related_only(&dists),
                _ => classify_ratio(&dists),
            };
            (label, dists.iter().map(|d| d.ratio).collect())
        }
    };

    let body = serde_json::json!({
        "method": method,
        "predicted_label": labels[index],
        "ratios": ratios,
    });
    write_or_print(&serde_json::to_string_pretty(&body).expect("prediction serializes"), args.out.as_deref())
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let format: ReportFormat = args.format.parse()?;
    let mut reports: Vec<ExperimentReport> = Vec::new();
    for path in &args.inputs {
        reports.push(read_json(path)?);
    }
    let first = reports.first().expect("clap enforces at least one input");
    for r in &reports[1..] {
        if r.config.method != first.config.method {
            return Err(Error::Config(format!(
                "cannot aggregate reports for different methods ({} vs {})",
                first.config.method.name(),
                r.config.method.name()
            )));
        }
    }
    let accuracies: Vec<f64> = reports
        .iter()
        .flat_map(|r| r.per_repetition_accuracy.iter().copied())
        .collect();
    let (mean_rr, standard_error) = mean_and_ste(&accuracies);
    let mut config = first.config.clone();
    config.repetitions = accuracies.len();
    let merged = ExperimentReport {
        config,
        per_repetition_accuracy: accuracies,
        mean_rr,
        standard_error,
        train_time_s: reports.iter().map(|r| r.train_time_s).sum(),
        test_time_s: reports.iter().map(|r| r.test_time_s).sum(),
    };
    match (&args.out, format) {
        (Some(path), _) => emit_report(&merged, format, path),
        (None, ReportFormat::Json) => write_or_print(&merged.to_json(), None),
        (None, ReportFormat::Csv) => write_or_print(merged.to_csv().trim_end(), None),
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 4,
        Error::Parse { .. } | Error::InconsistentDimension { .. } | Error::Config(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Run(args) => cmd_run(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
