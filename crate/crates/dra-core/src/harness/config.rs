//! Experiment configuration: the method under test, split counts,
//! repetition protocol and hyper-parameters with their defaults.

use super::synth::SynthConfig;
use crate::dra::{Regularization, ScatterModel};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Ridge weight default for the joint regressions.
pub const DEFAULT_RHO: f64 = 1e-2;
/// Default eig-regularization weight for the PE model.
pub const DEFAULT_MU_PE: f64 = 1e-3;
/// Default eig-regularization weight for the TE model.
pub const DEFAULT_MU_TE: f64 = 1e1;

/// Regularization kind named in a method string; the weight is resolved from
/// `mu` or the model default at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegKind {
    Eig,
    Exp,
}

/// The classification method an experiment evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dra {
        model: ScatterModel,
        reg: RegKind,
        pca: bool,
    },
    /// Unprojected ratio classifier with NFS unrelated groups.
    Nfs,
    /// Related-distance-only ablation baseline.
    DlrcBaseline,
    /// Unprojected ratio classifier with Euclidean-selected unrelated groups.
    EuclidBaseline,
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Method::Dra { model, reg, pca } => {
                let m = match model {
                    ScatterModel::Pe => "PE",
                    ScatterModel::Te => "TE",
                };
                let r = match reg {
                    RegKind::Eig => "eig",
                    RegKind::Exp => "exp",
                };
                let prefix = if *pca { "PCA+DRA" } else { "DRA" };
                format!("{prefix}-{m}-{r}")
            }
            Method::Nfs => "NFS".into(),
            Method::DlrcBaseline => "DLRC-baseline".into(),
            Method::EuclidBaseline => "EuclidSelect-baseline".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        let dra = |rest: &str, pca: bool| -> Result<Method> {
            let (model, reg) = match rest {
                "PE-eig" => (ScatterModel::Pe, RegKind::Eig),
                "PE-exp" => (ScatterModel::Pe, RegKind::Exp),
                "TE-eig" => (ScatterModel::Te, RegKind::Eig),
                "TE-exp" => (ScatterModel::Te, RegKind::Exp),
                _ => return Err(Error::Config(format!("unknown method suffix '{rest}'"))),
            };
            Ok(Method::Dra { model, reg, pca })
        };
        match s {
            "NFS" => Ok(Method::Nfs),
            "DLRC-baseline" => Ok(Method::DlrcBaseline),
            "EuclidSelect-baseline" => Ok(Method::EuclidBaseline),
            _ if s.starts_with("PCA+DRA-") => dra(&s["PCA+DRA-".len()..], true),
            _ if s.starts_with("DRA-") => dra(&s["DRA-".len()..], false),
            _ => Err(Error::Config(format!("unknown method '{s}'"))),
        }
    }

    /// Default eig weight for the method's scatter model.
    pub fn default_mu(&self) -> Option<f64> {
        match self {
            Method::Dra { model, .. } => Some(match model {
                ScatterModel::Pe => DEFAULT_MU_PE,
                ScatterModel::Te => DEFAULT_MU_TE,
            }),
            _ => None,
        }
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Method::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Per-class sample counts for the three-way random split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
}

impl SplitCounts {
    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.n_train, self.n_valid, self.n_test)
    }
}

/// Projection dimension: a fixed value or "auto" (resolves to the class
/// count at run time).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TChoice {
    Auto(AutoTag),
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

impl Default for TChoice {
    fn default() -> Self {
        TChoice::Auto(AutoTag::Auto)
    }
}

impl TChoice {
    pub fn resolve(&self, c: usize) -> usize {
        match self {
            TChoice::Auto(_) => c,
            TChoice::Fixed(t) => *t,
        }
    }
}

/// Where the per-class sample pools come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetSource {
    /// Feature CSV (header `set_hint,class_id,f0,...`).
    Csv { path: String },
    /// Deterministic synthetic generator.
    Synth(SynthConfig),
}

/// Full experiment description, mirrored one-to-one by the JSON config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub method: Method,
    pub counts: SplitCounts,
    pub repetitions: usize,
    pub seed: u64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub t: TChoice,
    #[serde(default)]
    pub pca_q: Option<usize>,
    pub dataset: DatasetSource,
}

fn default_rho() -> f64 {
    DEFAULT_RHO
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.counts.n_train < 2 || self.counts.n_valid < 2 || self.counts.n_test < 2 {
            return Err(Error::Config("each split count must be at least 2".into()));
        }
        if self.rho <= 0.0 {
            return Err(Error::Config(format!("rho must be positive, got {}", self.rho)));
        }
        Ok(())
    }

    /// Resolves `t = auto`, the mu default and the PCA dimension against the
    /// dataset's class count and feature dimension.
    pub fn resolve(&self, c: usize, d: usize) -> ResolvedConfig {
        let mu = self.mu.or_else(|| self.method.default_mu());
        let pca_q = match self.method {
            Method::Dra { pca: true, .. } => Some(self.pca_q.unwrap_or_else(|| d.min(500))),
            _ => self.pca_q,
        };
        ResolvedConfig {
            method: self.method,
            counts: self.counts,
            repetitions: self.repetitions,
            seed: self.seed,
            rho: self.rho,
            mu,
            t: self.t.resolve(c),
            pca_q,
            dataset: self.dataset.clone(),
        }
    }
}

/// Config echo with every "auto" and default made explicit.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ResolvedConfig {
    pub method: Method,
    pub counts: SplitCounts,
    pub repetitions: usize,
    pub seed: u64,
    pub rho: f64,
    pub mu: Option<f64>,
    pub t: usize,
    pub pca_q: Option<usize>,
    pub dataset: DatasetSource,
}

impl ResolvedConfig {
    /// Regularization for the DRA training call.
    pub fn regularization(&self) -> Option<Regularization> {
        match self.method {
            Method::Dra { reg, .. } => Some(match reg {
                RegKind::Eig => Regularization::Eig {
                    mu: self.mu.expect("mu resolved for eig methods"),
                },
                RegKind::Exp => Regularization::Exp,
            }),
            _ => None,
        }
    }
}
