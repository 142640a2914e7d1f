//! The repeated-random-split experiment protocol: for each repetition the
//! pools are split with `seed + repetition`, the method trains (when it has
//! a training stage) and every per-class test set is classified. Accuracy
//! per repetition is correct sets over `c`; the report aggregates mean
//! recognition rate and standard error.
//!
//! Repetition seeds depend only on the config, so two methods run with the
//! same seed see identical splits and their accuracies are paired.

use super::config::{DatasetSource, ExperimentConfig, Method, ResolvedConfig};
use super::io::load_dataset;
use super::report::ExperimentReport;
use super::synth::synth_generate;
use crate::dra::{dra_train, pca_dra_train, project_classify};
use crate::residual::{class_distances, classify_ratio, classify_related_only};
use crate::setcore::{random_split, SamplePools, UnrelatedStrategy};
use crate::{Error, Result};
use std::time::Instant;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Materializes per-class pools from the configured source.
pub fn pools_from_source(source: &DatasetSource) -> Result<SamplePools> {
    match source {
        DatasetSource::Synth(cfg) => synth_generate(cfg),
        DatasetSource::Csv { path } => Ok(load_dataset(path)?.pools),
    }
}

struct RepetitionOutcome {
    accuracy: f64,
    train_time_s: f64,
    test_time_s: f64,
}

fn run_repetition(
    cfg: &ResolvedConfig,
    pools: &SamplePools,
    rep: usize,
) -> Result<RepetitionOutcome> {
    let seed = cfg.seed.wrapping_add(rep as u64);
    let (train, valid, test) =
        random_split(pools, cfg.counts.as_tuple(), seed).map_err(|e| {
            Error::Config(format!("repetition {rep}: {e}"))
        })?;
    let c = train.c;
    let strategy = match cfg.method {
        Method::EuclidBaseline => UnrelatedStrategy::EuclidSelect(None),
        _ => UnrelatedStrategy::Nfs,
    };

    enum Trained {
        None,
        Plain(crate::dra::DiscriminantProjection),
        Pca(crate::dra::PcaDra),
    }

    let train_start = Instant::now();
    let trained = match cfg.method {
        Method::Dra { model, pca, .. } => {
            let reg = cfg.regularization().expect("dra method has regularization");
            let t = cfg.t.min(if pca {
                cfg.pca_q.unwrap_or(train.d)
            } else {
                train.d
            });
            if pca {
                let q = cfg.pca_q.expect("pca_q resolved for PCA methods");
                Trained::Pca(pca_dra_train(
                    &train, &valid, q, model, reg, strategy, cfg.rho, t,
                )?)
            } else {
                Trained::Plain(dra_train(
                    &train, &valid, model, reg, strategy, cfg.rho, t,
                )?)
            }
        }
        _ => Trained::None,
    };
    let train_time_s = train_start.elapsed().as_secs_f64();

    let test_start = Instant::now();
    let mut correct = 0usize;
    for l in 0..c {
        let probe = test.class_set(l).expect("split produced every class");
        let predicted = match &trained {
            Trained::Plain(proj) => {
                project_classify(proj, &train, probe, strategy, cfg.rho)?.0
            }
            Trained::Pca(model) => model.classify(probe, strategy, cfg.rho)?.0,
            Trained::None => {
                let dists = class_distances(&train, probe, strategy, cfg.rho)?;
                match cfg.method {
                    Method::DlrcBaseline => classify_related_only(&dists),
                    _ => classify_ratio(&dists),
                }
            }
        };
        if predicted == l {
            correct += 1;
        }
    }
    let test_time_s = test_start.elapsed().as_secs_f64();

    Ok(RepetitionOutcome {
        accuracy: correct as f64 / c as f64,
        train_time_s,
        test_time_s,
    })
}

/// Runs the configured experiment end to end. Deterministic given the
/// config (timing fields aside) at any worker count: repetitions are
/// independent and gathered in repetition order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let pools = pools_from_source(&cfg.dataset)?;
    let c = pools.len();
    let d = pools
        .first()
        .and_then(|p| p.first())
        .map(Vec::len)
        .ok_or_else(|| Error::Config("dataset has no samples".into()))?;
    let resolved = cfg.resolve(c, d);

    let reps: Vec<usize> = (0..cfg.repetitions).collect();
    #[cfg(feature = "parallel")]
    let outcomes: Result<Vec<_>> = reps
        .par_iter()
        .map(|&rep| run_repetition(&resolved, &pools, rep))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let outcomes: Result<Vec<_>> = reps
        .iter()
        .map(|&rep| run_repetition(&resolved, &pools, rep))
        .collect();
    let outcomes = outcomes?;

    let accuracies: Vec<f64> = outcomes.iter().map(|o| o.accuracy).collect();
    let train_time_s: f64 = outcomes.iter().map(|o| o.train_time_s).sum();
    let test_time_s: f64 = outcomes.iter().map(|o| o.test_time_s).sum();
    Ok(ExperimentReport::from_accuracies(
        resolved,
        accuracies,
        train_time_s,
        test_time_s,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{SplitCounts, TChoice};
    use crate::harness::synth::SynthConfig;

    fn separable_cfg(method: &str, reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            method: Method::parse(method).unwrap(),
            counts: SplitCounts {
                n_train: 3,
                n_valid: 3,
                n_test: 3,
            },
            repetitions: reps,
            seed: 11,
            rho: 1e-2,
            mu: None,
            t: TChoice::default(),
            pca_q: None,
            dataset: DatasetSource::Synth(SynthConfig {
                c: 4,
                d: 10,
                samples_per_class: 12,
                variation_rank: 0,
                variation_scale: 0.0,
                noise_sigma: 0.05,
                class_sep: 10.0,
                seed: 3,
            }),
        }
    }

    #[test]
    fn nfs_on_separable_data_is_perfect() {
        let report = run_experiment(&separable_cfg("NFS", 5)).unwrap();
        assert_eq!(report.per_repetition_accuracy, vec![1.0; 5]);
        assert_eq!(report.mean_rr, 1.0);
        assert_eq!(report.standard_error, 0.0);
    }

    #[test]
    fn single_repetition_has_zero_ste() {
        let report = run_experiment(&separable_cfg("DLRC-baseline", 1)).unwrap();
        assert_eq!(report.standard_error, 0.0);
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = separable_cfg("DRA-PE-eig", 3);
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.to_json_without_timing(), b.to_json_without_timing());
    }

    #[test]
    fn config_echo_carries_defaults() {
        let report = run_experiment(&separable_cfg("DRA-TE-eig", 2)).unwrap();
        assert_eq!(report.config.t, 4); // auto resolves to c
        assert_eq!(report.config.rho, 1e-2);
        assert_eq!(report.config.mu, Some(1e1));
    }

    #[test]
    fn euclid_baseline_runs() {
        let report = run_experiment(&separable_cfg("EuclidSelect-baseline", 2)).unwrap();
        assert!(report.mean_rr >= 0.0 && report.mean_rr <= 1.0);
    }

    #[test]
    fn accuracy_bounds_hold() {
        let mut cfg = separable_cfg("DRA-PE-exp", 3);
        if let DatasetSource::Synth(s) = &mut cfg.dataset {
            s.noise_sigma = 3.0; // hard problem, accuracy well below 1
        }
        let report = run_experiment(&cfg).unwrap();
        for a in &report.per_repetition_accuracy {
            assert!((0.0..=1.0).contains(a));
        }
        assert!(report.standard_error >= 0.0);
    }
}
