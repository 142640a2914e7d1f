//! Joint difference-form regression between a group and a probe set, the
//! residual vectors and distances derived from it, and the unprojected
//! baseline classifiers (ratio rule and related-distance-only rule).

use crate::linalg::{ridge_solve, Mat, RidgeProblem};
use crate::setcore::{difference_transform, unrelated_group, Dataset, ImageSet, UnrelatedStrategy};
use crate::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Residual of one group-vs-probe regression.
#[derive(Debug, Clone)]
pub struct PairResidual {
    pub residual: Vec<f64>,
    pub distance: f64,
    pub coeffs: Vec<f64>,
}

/// Related and unrelated residuals of one candidate class, plus the decision
/// ratio `d_r / d_u`.
#[derive(Debug, Clone)]
pub struct ClassDistances {
    pub class_id: usize,
    pub related: PairResidual,
    pub unrelated: PairResidual,
    pub ratio: f64,
}

/// Ratio with the degenerate-denominator rule: zero over zero is 0, anything
/// else over zero is +inf.
pub fn decision_ratio(related: f64, unrelated: f64) -> f64 {
    if unrelated == 0.0 {
        if related == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        related / unrelated
    }
}

/// Solves the joint regression `[G_hat, -P_hat] gamma = p_anchor - g_anchor`
/// by ridge and returns the residual `D gamma - rhs` with its norm.
pub fn pair_residual(group: &ImageSet, probe: &ImageSet, rho: f64) -> Result<PairResidual> {
    if group.dim() != probe.dim() {
        return Err(Error::DimensionMismatch {
            context: "pair_residual feature dimension",
            expected: group.dim(),
            got: probe.dim(),
        });
    }
    let g = difference_transform(group)?;
    let p = difference_transform(probe)?;
    let d = group.dim();
    let (gc, pc) = (g.design.cols(), p.design.cols());
    let design = Mat::from_fn(d, gc + pc, |i, j| {
        if j < gc {
            g.design.get(i, j)
        } else {
            -p.design.get(i, j - gc)
        }
    });
    let rhs: Vec<f64> = (0..d).map(|i| p.anchor[i] - g.anchor[i]).collect();
    let coeffs = ridge_solve(&RidgeProblem {
        design: design.clone(),
        rhs: rhs.clone(),
        rho,
    })?;
    let fitted = design.mat_vec(&coeffs);
    let residual: Vec<f64> = fitted.iter().zip(&rhs).map(|(f, r)| f - r).collect();
    let distance = residual.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(PairResidual {
        residual,
        distance,
        coeffs,
    })
}

/// Related and unrelated residual distances of the probe against every class.
///
/// The per-class regressions are independent and evaluated in parallel when
/// the `parallel` feature is on; results are gathered in class order, so the
/// output is identical to sequential evaluation.
pub fn class_distances(
    train: &Dataset,
    probe: &ImageSet,
    strategy: UnrelatedStrategy,
    rho: f64,
) -> Result<Vec<ClassDistances>> {
    if train.c < 2 {
        return Err(Error::SingleClass(train.c));
    }
    let per_class = |k: usize| -> Result<ClassDistances> {
        let related_group = train.class_set(k).ok_or_else(|| {
            Error::ClassMismatch(format!("missing training set for class {k}"))
        })?;
        let unrelated = unrelated_group(train, k, probe, strategy)?;
        let related = pair_residual(related_group, probe, rho)?;
        let unrelated = pair_residual(&unrelated, probe, rho)?;
        let ratio = decision_ratio(related.distance, unrelated.distance);
        Ok(ClassDistances {
            class_id: k,
            related,
            unrelated,
            ratio,
        })
    };
    #[cfg(feature = "parallel")]
    {
        (0..train.c).into_par_iter().map(per_class).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..train.c).map(per_class).collect()
    }
}

/// Argmin over the decision ratio `d_r / d_u`; ties go to the smallest class.
pub fn classify_ratio(dists: &[ClassDistances]) -> usize {
    argmin_by(dists, |d| d.ratio)
}

/// DLRC-style baseline: argmin over the related distance alone.
pub fn classify_related_only(dists: &[ClassDistances]) -> usize {
    argmin_by(dists, |d| d.related.distance)
}

fn argmin_by(dists: &[ClassDistances], key: impl Fn(&ClassDistances) -> f64) -> usize {
    assert!(!dists.is_empty(), "argmin over empty distance list");
    let mut best = 0;
    let mut best_val = key(&dists[0]);
    for (i, d) in dists.iter().enumerate().skip(1) {
        let v = key(d);
        if v < best_val {
            best = i;
            best_val = v;
        }
    }
    dists[best].class_id
}
