//! Deterministic synthetic set generator: class means at a fixed pairwise
//! separation, a shared low-rank variation subspace with large coefficients
//! (so intra-class spread can dwarf the class separation) and isotropic
//! noise.

use crate::setcore::SamplePools;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Generator parameters. `samples = class_mean + shared_basis * coeff + noise`
/// with `coeff ~ N(0, variation_scale^2)` on `variation_rank` shared
/// directions and `noise ~ N(0, noise_sigma^2)` isotropic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub c: usize,
    pub d: usize,
    pub samples_per_class: usize,
    pub variation_rank: usize,
    #[serde(default)]
    pub variation_scale: f64,
    pub noise_sigma: f64,
    pub class_sep: f64,
    #[serde(default)]
    pub seed: u64,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; rand_distr is not pulled in just for this
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Gram-Schmidt orthonormalization of random Gaussian columns.
fn random_orthonormal(d: usize, r: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(r);
    while basis.len() < r {
        let mut v: Vec<f64> = (0..d).map(|_| normal(rng)).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= dot * y;
            }
        }
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            basis.push(v.iter().map(|x| x / n).collect());
        }
    }
    basis
}

/// Generates per-class sample pools, deterministic in `cfg.seed`.
///
/// Class means sit on scaled coordinate axes (`class_sep / sqrt(2) * e_k`),
/// which puts every pair of means at Euclidean distance `class_sep` and
/// requires `c <= d`.
pub fn synth_generate(cfg: &SynthConfig) -> Result<SamplePools> {
    if cfg.c < 2 {
        return Err(Error::SingleClass(cfg.c));
    }
    if cfg.variation_rank >= cfg.d {
        return Err(Error::BadDimension(format!(
            "variation rank {} must be below dimension {}",
            cfg.variation_rank, cfg.d
        )));
    }
    if cfg.c > cfg.d {
        return Err(Error::BadDimension(format!(
            "axis-aligned class means need c <= d, got c={} d={}",
            cfg.c, cfg.d
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let basis = random_orthonormal(cfg.d, cfg.variation_rank, &mut rng);
    let mean_scale = cfg.class_sep / std::f64::consts::SQRT_2;
    let pools = (0..cfg.c)
        .map(|k| {
            (0..cfg.samples_per_class)
                .map(|_| {
                    let mut x = vec![0.0; cfg.d];
                    x[k] = mean_scale;
                    for b in &basis {
                        let coeff = cfg.variation_scale * normal(&mut rng);
                        for (xi, bi) in x.iter_mut().zip(b) {
                            *xi += coeff * bi;
                        }
                    }
                    for xi in x.iter_mut() {
                        *xi += cfg.noise_sigma * normal(&mut rng);
                    }
                    x
                })
                .collect()
        })
        .collect();
    Ok(pools)
}
