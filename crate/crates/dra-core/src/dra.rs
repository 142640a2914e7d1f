//! Discriminant projection learning on the residual space: residual
//! collection over training x validation class pairs, PE/TE scatter
//! assembly, regularized generalized eigenproblems, and the projected
//! classifier. Also the PCA-reduced pipeline for high-dimensional features.

use crate::linalg::{
    pca_fit, spectral_norm, sym_expm, sym_gevd, Mat, PcaModel, SymMatrix,
};
use crate::residual::{class_distances, decision_ratio, pair_residual, ClassDistances};
use crate::setcore::{unrelated_group, Dataset, ImageSet, UnrelatedStrategy};
use crate::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Which residual pairs enter the scatter matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScatterModel {
    /// Partial-Error: same-class (diagonal) residual pairs only.
    Pe,
    /// Total-Error: all class pairs, off-diagonal roles swapped.
    Te,
}

/// Regularization of the generalized eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularization {
    /// Shift the denominator scatter to `A2 + mu I`.
    Eig { mu: f64 },
    /// Replace both scatters by their (scaled) matrix exponentials.
    Exp,
}

/// All residual vectors from the training x validation class grid:
/// `related[k][l]` and `unrelated[k][l]` come from regressing validation
/// set `l` against class `k`'s related/unrelated groups.
#[derive(Debug, Clone)]
pub struct ResidualBank {
    pub c: usize,
    pub d: usize,
    pub related: Vec<Vec<Vec<f64>>>,
    pub unrelated: Vec<Vec<Vec<f64>>>,
}

/// The numerator/denominator scatter pair of the GEVD.
#[derive(Debug, Clone)]
pub struct ScatterPair {
    pub a1: SymMatrix,
    pub a2: SymMatrix,
    pub model: ScatterModel,
}

/// Learned discriminant projection with its provenance.
#[derive(Debug, Clone)]
pub struct DiscriminantProjection {
    /// `d x t` projection, unit-norm columns.
    pub p: Mat,
    pub eigvals: Vec<f64>,
    pub model: ScatterModel,
    pub reg: Regularization,
    pub t: usize,
}

/// Runs the c x c grid of training-vs-validation regressions and collects
/// every residual. Pairs are independent; with the `parallel` feature they
/// run concurrently and are gathered in (k, l) order.
pub fn collect_residuals(
    train: &Dataset,
    valid: &Dataset,
    strategy: UnrelatedStrategy,
    rho: f64,
) -> Result<ResidualBank> {
    if train.c < 2 {
        return Err(Error::SingleClass(train.c));
    }
    if train.c != valid.c {
        return Err(Error::ClassMismatch(format!(
            "train has {} classes, validation has {}",
            train.c, valid.c
        )));
    }
    if train.d != valid.d {
        return Err(Error::DimensionMismatch {
            context: "train/validation feature dimension",
            expected: train.d,
            got: valid.d,
        });
    }
    let c = train.c;
    let pair = |k: usize, l: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let probe = valid
            .class_set(l)
            .ok_or_else(|| Error::ClassMismatch(format!("missing validation set {l}")))?;
        let related_group = train
            .class_set(k)
            .ok_or_else(|| Error::ClassMismatch(format!("missing training set {k}")))?;
        let u = unrelated_group(train, k, probe, strategy)?;
        let er = pair_residual(related_group, probe, rho)?;
        let eu = pair_residual(&u, probe, rho)?;
        Ok((er.residual, eu.residual))
    };
    let grid: Vec<(usize, usize)> = (0..c).flat_map(|k| (0..c).map(move |l| (k, l))).collect();
    #[cfg(feature = "parallel")]
    let results: Result<Vec<_>> = grid.par_iter().map(|&(k, l)| pair(k, l)).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Result<Vec<_>> = grid.iter().map(|&(k, l)| pair(k, l)).collect();
    let results = results?;

    let mut related = vec![vec![Vec::new(); c]; c];
    let mut unrelated = vec![vec![Vec::new(); c]; c];
    for ((k, l), (er, eu)) in grid.into_iter().zip(results) {
        related[k][l] = er;
        unrelated[k][l] = eu;
    }
    Ok(ResidualBank {
        c,
        d: train.d,
        related,
        unrelated,
    })
}

/// PE scatter: `A1 = sum_i e_u^ii e_u^ii^T`, `A2 = sum_i e_r^ii e_r^ii^T`.
pub fn scatter_pe(bank: &ResidualBank) -> ScatterPair {
    let mut a1 = SymMatrix::zeros(bank.d);
    let mut a2 = SymMatrix::zeros(bank.d);
    for i in 0..bank.c {
        a1.add_outer(&bank.unrelated[i][i], 1.0);
        a2.add_outer(&bank.related[i][i], 1.0);
    }
    ScatterPair {
        a1,
        a2,
        model: ScatterModel::Pe,
    }
}

/// TE scatter: the PE terms plus the off-diagonal residuals with their roles
/// swapped (`A1` also gathers off-diagonal related residuals, `A2` the
/// off-diagonal unrelated ones).
pub fn scatter_te(bank: &ResidualBank) -> ScatterPair {
    let mut pair = scatter_pe(bank);
    for i in 0..bank.c {
        for j in 0..bank.c {
            if i == j {
                continue;
            }
            pair.a1.add_outer(&bank.related[i][j], 1.0);
            pair.a2.add_outer(&bank.unrelated[i][j], 1.0);
        }
    }
    pair.model = ScatterModel::Te;
    pair
}

/// Assembles the scatter pair for the requested model.
pub fn scatter(bank: &ResidualBank, model: ScatterModel) -> ScatterPair {
    match model {
        ScatterModel::Pe => scatter_pe(bank),
        ScatterModel::Te => scatter_te(bank),
    }
}

/// Solves the regularized GEVD and keeps the top-`t` eigenvectors.
///
/// `eig` mode solves `A1 p = lambda (A2 + mu I) p`. `exp` mode rescales both
/// scatters by `s = 1 / max(1, ||A1||_2, ||A2||_2)` before exponentiating,
/// so the exponentials stay inside double range, then solves
/// `exp(s A1) p = lambda exp(s A2) p`. Both exponentials are SPD, so exp
/// mode is defined even for rank-deficient scatters.
pub fn learn_projection(
    s: &ScatterPair,
    reg: Regularization,
    t: usize,
) -> Result<DiscriminantProjection> {
    let d = s.a1.order();
    if t == 0 || t > d {
        return Err(Error::BadDimension(format!(
            "projection dimension t={t} outside 1..={d}"
        )));
    }
    let eig = match reg {
        Regularization::Eig { mu } => {
            if mu <= 0.0 {
                return Err(Error::Config(format!("eig regularization needs mu > 0, got {mu}")));
            }
            sym_gevd(&s.a1, &s.a2.add_scaled_identity(mu))?
        }
        Regularization::Exp => {
            let scale = 1.0
                / spectral_norm(&s.a1)?
                    .max(spectral_norm(&s.a2)?)
                    .max(1.0);
            sym_gevd(&sym_expm(&s.a1.scale(scale))?, &sym_expm(&s.a2.scale(scale))?)?
        }
    };
    let top = eig.truncate(t);
    Ok(DiscriminantProjection {
        p: top.vectors,
        eigvals: top.values,
        model: s.model,
        reg,
        t,
    })
}

/// Classifies a probe with a learned projection: residuals are computed in
/// the original space, then compared through `||P^T e_r|| / ||P^T e_u||`.
/// Returns the predicted class and the per-class projected ratios.
pub fn project_classify(
    proj: &DiscriminantProjection,
    train: &Dataset,
    probe: &ImageSet,
    strategy: UnrelatedStrategy,
    rho: f64,
) -> Result<(usize, Vec<f64>)> {
    if proj.p.rows() != train.d {
        return Err(Error::DimensionMismatch {
            context: "projection rows vs dataset dimension",
            expected: train.d,
            got: proj.p.rows(),
        });
    }
    let dists = class_distances(train, probe, strategy, rho)?;
    let ratios = projected_ratios(proj, &dists);
    Ok((argmin_class(&dists, &ratios), ratios))
}

/// Projected decision distances for already-computed residuals.
pub fn projected_ratios(proj: &DiscriminantProjection, dists: &[ClassDistances]) -> Vec<f64> {
    dists
        .iter()
        .map(|d| {
            let pr = proj.p.transpose_vec(&d.related.residual);
            let pu = proj.p.transpose_vec(&d.unrelated.residual);
            let nr = pr.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nu = pu.iter().map(|x| x * x).sum::<f64>().sqrt();
            decision_ratio(nr, nu)
        })
        .collect()
}

fn argmin_class(dists: &[ClassDistances], ratios: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..ratios.len() {
        if ratios[i] < ratios[best] {
            best = i;
        }
    }
    dists[best].class_id
}

/// Full training pipeline: residual bank, scatter assembly, projection.
#[allow(clippy::too_many_arguments)]
pub fn dra_train(
    train: &Dataset,
    valid: &Dataset,
    model: ScatterModel,
    reg: Regularization,
    strategy: UnrelatedStrategy,
    rho: f64,
    t: usize,
) -> Result<DiscriminantProjection> {
    let bank = collect_residuals(train, valid, strategy, rho)?;
    learn_projection(&scatter(&bank, model), reg, t)
}

/// PCA-reduced DRA: PCA is fit on the union of training and validation
/// samples, every set is projected to `q` dimensions, and the discriminant
/// projection is learned there. Probes must pass through [`PcaDra::classify`]
/// so they receive the same map.
#[derive(Debug, Clone)]
pub struct PcaDra {
    pub pca: PcaModel,
    pub projection: DiscriminantProjection,
    pub train_reduced: Dataset,
}

#[allow(clippy::too_many_arguments)]
pub fn pca_dra_train(
    train: &Dataset,
    valid: &Dataset,
    q: usize,
    model: ScatterModel,
    reg: Regularization,
    strategy: UnrelatedStrategy,
    rho: f64,
    t: usize,
) -> Result<PcaDra> {
    if q > train.d {
        return Err(Error::BadDimension(format!(
            "pca dimension q={q} exceeds feature dimension d={}",
            train.d
        )));
    }
    let union_cols: Vec<Vec<f64>> = train
        .sets
        .iter()
        .chain(valid.sets.iter())
        .flat_map(|s| (0..s.len()).map(|j| s.samples.col(j)).collect::<Vec<_>>())
        .collect();
    let pca = pca_fit(&Mat::from_cols(&union_cols), q)?;
    let train_reduced = train.map_samples(|m| pca.project_mat(m))?;
    let valid_reduced = valid.map_samples(|m| pca.project_mat(m))?;
    let projection = dra_train(&train_reduced, &valid_reduced, model, reg, strategy, rho, t)?;
    Ok(PcaDra {
        pca,
        projection,
        train_reduced,
    })
}

impl PcaDra {
    /// Maps the probe through PCA and classifies in the reduced space.
    pub fn classify(
        &self,
        probe: &ImageSet,
        strategy: UnrelatedStrategy,
        rho: f64,
    ) -> Result<(usize, Vec<f64>)> {
        let reduced = ImageSet::new(probe.class_id, self.pca.project_mat(&probe.samples));
        project_classify(&self.projection, &self.train_reduced, &reduced, strategy, rho)
    }
}
