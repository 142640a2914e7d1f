//! Browser bindings for the interactive demo page. Three operations are
//! exposed, all speaking JSON strings so the page needs no generated glue
//! types: scatter-plot data for a synthetic dataset, a single-split
//! classification run, and an accuracy curve over the ridge weight.

use dra_core::dra::{dra_train, project_classify, Regularization, ScatterModel};
use dra_core::harness::{synth_generate, Method, RegKind, SynthConfig};
use dra_core::linalg::{pca_fit, Mat};
use dra_core::residual::{class_distances, classify_ratio, classify_related_only};
use dra_core::setcore::{random_split, Dataset, UnrelatedStrategy};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Everything the page can vary: the generator, the method and its
/// hyper-parameters, and the split seed.
#[derive(Debug, Clone, Deserialize)]
struct DemoConfig {
    synth: SynthConfig,
    #[serde(default = "default_method")]
    method: String,
    #[serde(default = "default_rho")]
    rho: f64,
    #[serde(default)]
    mu: Option<f64>,
    #[serde(default)]
    t: Option<usize>,
    #[serde(default)]
    split_seed: u64,
}

fn default_method() -> String {
    "DRA-PE-eig".into()
}

fn default_rho() -> f64 {
    1e-2
}

fn fail(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

#[derive(Serialize)]
struct ScatterPoint {
    x: f64,
    y: f64,
    class: usize,
}

/// Generates the configured synthetic dataset and returns its samples
/// projected onto their top two principal directions, for plotting.
#[wasm_bindgen]
pub fn generate_scatter(config_json: &str) -> String {
    let cfg: DemoConfig = match serde_json::from_str(config_json) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let pools = match synth_generate(&cfg.synth) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let all: Vec<Vec<f64>> = pools.iter().flatten().cloned().collect();
    let pca = match pca_fit(&Mat::from_cols(&all), 2) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let mut points = Vec::new();
    for (class, pool) in pools.iter().enumerate() {
        for sample in pool {
            let p = pca.project_vec(sample);
            points.push(ScatterPoint {
                x: p[0],
                y: *p.get(1).unwrap_or(&0.0),
                class,
            });
        }
    }
    serde_json::json!({ "c": pools.len(), "points": points }).to_string()
}

#[derive(Serialize)]
struct ProbeOutcome {
    true_class: usize,
    predicted: usize,
    ratios: Vec<f64>,
}

fn classify_split(cfg: &DemoConfig, split_seed: u64) -> Result<(f64, Vec<ProbeOutcome>), String> {
    let method = Method::parse(&cfg.method).map_err(|e| e.to_string())?;
    let pools = synth_generate(&cfg.synth).map_err(|e| e.to_string())?;
    let (train, valid, test) =
        random_split(&pools, (3, 3, 3), split_seed).map_err(|e| e.to_string())?;
    let strategy = match method {
        Method::EuclidBaseline => UnrelatedStrategy::EuclidSelect(None),
        _ => UnrelatedStrategy::Nfs,
    };
    let projection = match method {
        Method::Dra { model, reg, pca } => {
            if pca {
                return Err("the demo runs the full-dimension pipeline only".into());
            }
            let mu_default = match model {
                ScatterModel::Pe => 1e-3,
                ScatterModel::Te => 1e1,
            };
            let reg = match reg {
                RegKind::Eig => Regularization::Eig {
                    mu: cfg.mu.unwrap_or(mu_default),
                },
                RegKind::Exp => Regularization::Exp,
            };
            let t = cfg.t.unwrap_or(train.c).min(train.d);
            Some(
                dra_train(&train, &valid, model, reg, strategy, cfg.rho, t)
                    .map_err(|e| e.to_string())?,
            )
        }
        _ => None,
    };

    let mut outcomes = Vec::new();
    let mut correct = 0usize;
    for l in 0..train.c {
        let probe = probe_set(&test, l)?;
        let (predicted, ratios) = match &projection {
            Some(proj) => project_classify(proj, &train, probe, strategy, cfg.rho)
                .map_err(|e| e.to_string())?,
            None => {
                let dists = class_distances(&train, probe, strategy, cfg.rho)
                    .map_err(|e| e.to_string())?;
                let label = match method {
                    Method::DlrcBaseline => classify_related_only(&dists),
                    _ => classify_ratio(&dists),
                };
                (label, dists.iter().map(|d| d.ratio).collect())
            }
        };
        correct += usize::from(predicted == l);
        outcomes.push(ProbeOutcome {
            true_class: l,
            predicted,
            ratios,
        });
    }
    Ok((correct as f64 / train.c as f64, outcomes))
}

fn probe_set(test: &Dataset, l: usize) -> Result<&dra_core::setcore::ImageSet, String> {
    test.class_set(l).ok_or_else(|| format!("missing test set {l}"))
}

/// Runs one train/validation/test split with the configured method and
/// returns per-probe predictions and decision ratios.
#[wasm_bindgen]
pub fn evaluate_split(config_json: &str) -> String {
    let cfg: DemoConfig = match serde_json::from_str(config_json) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match classify_split(&cfg, cfg.split_seed) {
        Ok((accuracy, probes)) => serde_json::json!({
            "method": cfg.method,
            "accuracy": accuracy,
            "probes": probes,
        })
        .to_string(),
        Err(e) => fail(e),
    }
}

/// Sweeps the ridge weight over a log grid, averaging accuracy over a few
/// splits per point, and returns the curve.
#[wasm_bindgen]
pub fn accuracy_sweep(config_json: &str) -> String {
    let cfg: DemoConfig = match serde_json::from_str(config_json) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let mut curve = Vec::new();
    for exp in -5..=1 {
        let rho = 10f64.powi(exp);
        let point = DemoConfig {
            rho,
            ..cfg.clone()
        };
        let mut mean = 0.0;
        let splits = 3u64;
        for s in 0..splits {
            match classify_split(&point, cfg.split_seed + s) {
                Ok((acc, _)) => mean += acc,
                Err(e) => return fail(e),
            }
        }
        curve.push(serde_json::json!({
            "rho": rho,
            "accuracy": mean / splits as f64,
        }));
    }
    serde_json::json!({ "method": cfg.method, "curve": curve }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = r#"{
        "synth": {
            "c": 4, "d": 10, "samples_per_class": 12,
            "variation_rank": 2, "variation_scale": 1.0,
            "noise_sigma": 0.05, "class_sep": 6.0, "seed": 3
        },
        "method": "DRA-PE-eig"
    }"#;

    #[test]
    fn scatter_has_all_samples() {
        let v: serde_json::Value = serde_json::from_str(&generate_scatter(CFG)).unwrap();
        assert_eq!(v["c"], 4);
        assert_eq!(v["points"].as_array().unwrap().len(), 48);
    }

    #[test]
    fn evaluate_split_classifies_separable_data() {
        let v: serde_json::Value = serde_json::from_str(&evaluate_split(CFG)).unwrap();
        assert_eq!(v["accuracy"], 1.0);
        assert_eq!(v["probes"].as_array().unwrap().len(), 4);
        assert_eq!(v["probes"][0]["ratios"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn sweep_returns_a_curve() {
        let v: serde_json::Value = serde_json::from_str(&accuracy_sweep(CFG)).unwrap();
        assert_eq!(v["curve"].as_array().unwrap().len(), 7);
    }

    #[test]
    fn bad_config_reports_error() {
        let v: serde_json::Value = serde_json::from_str(&generate_scatter("{}")).unwrap();
        assert!(v["error"].is_string());
    }
}
