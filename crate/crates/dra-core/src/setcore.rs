//! Labeled image sets, the difference-form transform that turns the joint
//! set regression into an ordinary linear system, unrelated-group
//! construction (NFS and Euclidean nearest-sample selection), and the
//! randomized train/validation/test split used by the experiment protocol.

use crate::linalg::Mat;
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One labeled set of feature vectors: a `d x m` matrix whose columns are
/// samples, all sharing `class_id`.
#[derive(Debug, Clone)]
pub struct ImageSet {
    pub class_id: usize,
    pub samples: Mat,
}

impl ImageSet {
    pub fn new(class_id: usize, samples: Mat) -> Self {
        ImageSet { class_id, samples }
    }

    pub fn from_cols(class_id: usize, cols: &[Vec<f64>]) -> Self {
        ImageSet::new(class_id, Mat::from_cols(cols))
    }

    /// Feature dimension `d`.
    pub fn dim(&self) -> usize {
        self.samples.rows()
    }

    /// Sample count `m`.
    pub fn len(&self) -> usize {
        self.samples.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column-wise mean vector.
    pub fn mean(&self) -> Vec<f64> {
        let (d, m) = (self.dim(), self.len());
        (0..d)
            .map(|i| (0..m).map(|j| self.samples.get(i, j)).sum::<f64>() / m as f64)
            .collect()
    }
}

/// A collection of image sets spanning `c` classes with uniform dimension.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub sets: Vec<ImageSet>,
    pub c: usize,
    pub d: usize,
}

impl Dataset {
    /// Validates class ids and dimensional consistency.
    pub fn new(sets: Vec<ImageSet>) -> Result<Self> {
        let d = sets
            .first()
            .map(ImageSet::dim)
            .ok_or_else(|| Error::ClassMismatch("empty dataset".into()))?;
        let mut seen = std::collections::BTreeSet::new();
        for s in &sets {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    context: "dataset feature dimension",
                    expected: d,
                    got: s.dim(),
                });
            }
            seen.insert(s.class_id);
        }
        let c = seen.len();
        if seen.iter().max().copied() != Some(c - 1) || !seen.contains(&0) {
            return Err(Error::ClassMismatch(format!(
                "class ids must cover 0..{c} contiguously"
            )));
        }
        Ok(Dataset { sets, c, d })
    }

    /// The single set with the given class id (training datasets hold one
    /// set per class).
    pub fn class_set(&self, k: usize) -> Option<&ImageSet> {
        self.sets.iter().find(|s| s.class_id == k)
    }

    /// Total sample count across all sets.
    pub fn total_samples(&self) -> usize {
        self.sets.iter().map(ImageSet::len).sum()
    }

    /// Applies a map to every sample column (e.g. a PCA projection).
    pub fn map_samples(&self, f: impl Fn(&Mat) -> Mat) -> Result<Dataset> {
        Dataset::new(
            self.sets
                .iter()
                .map(|s| ImageSet::new(s.class_id, f(&s.samples)))
                .collect(),
        )
    }
}

/// Difference-form design of a set: every column minus a fixed anchor.
#[derive(Debug, Clone)]
pub struct AnchoredDesign {
    pub design: Mat,
    pub anchor: Vec<f64>,
}

/// Turns a set `[x_1 .. x_m]` into the anchored design
/// `[x_1 - x_m, .., x_{m-1} - x_m]` with the last column as anchor.
pub fn difference_transform(set: &ImageSet) -> Result<AnchoredDesign> {
    let m = set.len();
    if m < 2 {
        return Err(Error::TooFewSamples(m));
    }
    let anchor = set.samples.col(m - 1);
    let design = Mat::from_fn(set.dim(), m - 1, |i, j| set.samples.get(i, j) - anchor[i]);
    Ok(AnchoredDesign { design, anchor })
}

/// How the unrelated group of a class is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnrelatedStrategy {
    /// Nonfeasance: concatenate every other class's training samples, no
    /// selection step.
    Nfs,
    /// Euclidean nearest-sample selection against the probe mean; `None`
    /// defaults the count to the related group's size `m_k`.
    EuclidSelect(Option<usize>),
}

/// Builds the NFS unrelated group of class `k`: every training sample not
/// labeled `k`, in class-then-sample order. Independent of any probe.
pub fn nfs_unrelated(train: &Dataset, k: usize) -> Result<ImageSet> {
    if train.c < 2 {
        return Err(Error::SingleClass(train.c));
    }
    let mut cols = Vec::new();
    for class in 0..train.c {
        if class == k {
            continue;
        }
        let set = train.class_set(class).expect("validated dataset");
        for j in 0..set.len() {
            cols.push(set.samples.col(j));
        }
    }
    Ok(ImageSet::from_cols(k, &cols))
}

/// Builds an unrelated group by picking the `count` training samples outside
/// class `k` that lie closest (Euclidean) to the probe's mean vector. Ties
/// break by ascending `(class_id, sample index)`.
pub fn euclid_select_unrelated(
    train: &Dataset,
    k: usize,
    probe: &ImageSet,
    count: usize,
) -> Result<ImageSet> {
    if train.c < 2 {
        return Err(Error::SingleClass(train.c));
    }
    if probe.is_empty() {
        return Err(Error::TooFewSamples(0));
    }
    let target = probe.mean();
    let mut candidates: Vec<(f64, usize, usize, Vec<f64>)> = Vec::new();
    for class in 0..train.c {
        if class == k {
            continue;
        }
        let set = train.class_set(class).expect("validated dataset");
        for j in 0..set.len() {
            let col = set.samples.col(j);
            let dist: f64 = col
                .iter()
                .zip(&target)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            candidates.push((dist, class, j, col));
        }
    }
    if count > candidates.len() {
        return Err(Error::NotEnoughSamples {
            context: "euclid_select_unrelated",
            needed: count,
            available: candidates.len(),
        });
    }
    candidates.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let cols: Vec<Vec<f64>> = candidates[..count].iter().map(|c| c.3.clone()).collect();
    Ok(ImageSet::from_cols(k, &cols))
}

/// Resolves a strategy into the unrelated group for class `k` against a probe.
pub fn unrelated_group(
    train: &Dataset,
    k: usize,
    probe: &ImageSet,
    strategy: UnrelatedStrategy,
) -> Result<ImageSet> {
    match strategy {
        UnrelatedStrategy::Nfs => nfs_unrelated(train, k),
        UnrelatedStrategy::EuclidSelect(count) => {
            let count = count.unwrap_or_else(|| {
                train.class_set(k).map(ImageSet::len).unwrap_or(0)
            });
            euclid_select_unrelated(train, k, probe, count)
        }
    }
}

/// Per-class sample pools: `pools[class]` is a list of feature vectors.
pub type SamplePools = Vec<Vec<Vec<f64>>>;

/// Randomly partitions each class pool into disjoint train/validation/test
/// sets of the requested sizes. Deterministic in `seed` (ChaCha8).
pub fn random_split(
    pools: &SamplePools,
    counts: (usize, usize, usize),
    seed: u64,
) -> Result<(Dataset, Dataset, Dataset)> {
    let (n_train, n_valid, n_test) = counts;
    if n_train < 2 || n_valid < 2 || n_test < 2 {
        return Err(Error::Config(
            "each split count must be at least 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let needed = n_train + n_valid + n_test;
    let mut train = Vec::new();
    let mut valid = Vec::new();
    let mut test = Vec::new();
    for (class, pool) in pools.iter().enumerate() {
        if pool.len() < needed {
            return Err(Error::NotEnoughSamples {
                context: "random_split class pool",
                needed,
                available: pool.len(),
            });
        }
        let mut indices: Vec<usize> = (0..pool.len()).collect();
        indices.shuffle(&mut rng);
        let pick = |range: std::ops::Range<usize>| -> Vec<Vec<f64>> {
            indices[range].iter().map(|&i| pool[i].clone()).collect()
        };
        train.push(ImageSet::from_cols(class, &pick(0..n_train)));
        valid.push(ImageSet::from_cols(class, &pick(n_train..n_train + n_valid)));
        test.push(ImageSet::from_cols(
            class,
            &pick(n_train + n_valid..needed),
        ));
    }
    Ok((Dataset::new(train)?, Dataset::new(valid)?, Dataset::new(test)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn set(class: usize, cols: &[&[f64]]) -> ImageSet {
        ImageSet::from_cols(class, &cols.iter().map(|c| c.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn difference_transform_basic() {
        let s = set(0, &[&[1.0, 2.0], &[3.0, 4.0]]);
        let ad = difference_transform(&s).unwrap();
        assert_eq!(ad.anchor, vec![3.0, 4.0]);
        assert_eq!(ad.design.col(0), vec![-2.0, -2.0]);
    }

    #[test]
    fn difference_transform_equal_columns() {
        let s = set(0, &[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]]);
        let ad = difference_transform(&s).unwrap();
        for j in 0..2 {
            assert_eq!(ad.design.col(j), vec![0.0, 0.0]);
        }
    }

    #[test]
    fn difference_transform_standard_basis() {
        let s = set(
            0,
            &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]],
        );
        let ad = difference_transform(&s).unwrap();
        assert_eq!(ad.anchor, vec![0.0, 0.0, 1.0]);
        assert_eq!(ad.design.col(0), vec![1.0, 0.0, -1.0]);
        assert_eq!(ad.design.col(1), vec![0.0, 1.0, -1.0]);
    }

    #[test]
    fn difference_transform_reconstructs_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cols: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let s = ImageSet::from_cols(0, &cols);
        let ad = difference_transform(&s).unwrap();
        for j in 0..4 {
            for i in 0..4 {
                // one subtraction, so adding the anchor back is bit-exact
                assert_eq!(ad.design.get(i, j) + ad.anchor[i], cols[j][i]);
            }
        }
    }

    #[test]
    fn difference_transform_rejects_singleton() {
        let s = set(0, &[&[1.0, 2.0]]);
        assert!(matches!(
            difference_transform(&s),
            Err(Error::TooFewSamples(1))
        ));
    }

    fn toy_train() -> Dataset {
        Dataset::new(vec![
            set(0, &[&[0.0, 0.0], &[0.1, 0.0]]),
            set(1, &[&[1.0, 0.0], &[1.1, 0.0]]),
            set(2, &[&[0.0, 1.0], &[0.0, 1.1]]),
        ])
        .unwrap()
    }

    #[test]
    fn nfs_two_classes_is_other_class() {
        let train = Dataset::new(vec![
            set(0, &[&[0.0, 0.0], &[0.1, 0.0]]),
            set(1, &[&[1.0, 0.0], &[1.1, 0.0]]),
        ])
        .unwrap();
        let u = nfs_unrelated(&train, 0).unwrap();
        let x1 = train.class_set(1).unwrap();
        assert_eq!(u.len(), 2);
        for j in 0..2 {
            assert_eq!(u.samples.col(j), x1.samples.col(j));
        }
    }

    #[test]
    fn nfs_three_classes_count_and_order() {
        let train = toy_train();
        let u = nfs_unrelated(&train, 1).unwrap();
        assert_eq!(u.len(), 4);
        // classes 0 then 2, in sample order
        assert_eq!(u.samples.col(0), vec![0.0, 0.0]);
        assert_eq!(u.samples.col(1), vec![0.1, 0.0]);
        assert_eq!(u.samples.col(2), vec![0.0, 1.0]);
    }

    #[test]
    fn nfs_rejects_single_class() {
        let train = Dataset::new(vec![set(0, &[&[0.0, 0.0], &[0.1, 0.0]])]).unwrap();
        assert!(matches!(nfs_unrelated(&train, 0), Err(Error::SingleClass(1))));
    }

    #[test]
    fn nfs_excludes_own_class() {
        let train = toy_train();
        for k in 0..3 {
            let u = nfs_unrelated(&train, k).unwrap();
            let own = train.class_set(k).unwrap();
            for j in 0..u.len() {
                for jo in 0..own.len() {
                    assert_ne!(u.samples.col(j), own.samples.col(jo));
                }
            }
        }
    }

    /// Three one-sample classes: x1=(1,0,0), x2=(2,2,2), x3=(0,1,0). The
    /// nearest sample to x3 outside class 2 is x1 at distance sqrt(2) < 3.
    #[test]
    fn euclid_select_three_point_exemplar() {
        let train = Dataset::new(vec![
            set(0, &[&[1.0, 0.0, 0.0]]),
            set(1, &[&[2.0, 2.0, 2.0]]),
            set(2, &[&[0.0, 1.0, 0.0]]),
        ])
        .unwrap();
        let probe = set(2, &[&[0.0, 1.0, 0.0]]);
        let u = euclid_select_unrelated(&train, 2, &probe, 1).unwrap();
        assert_eq!(u.samples.col(0), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn euclid_select_everything_equals_nfs() {
        let train = toy_train();
        let probe = set(0, &[&[0.5, 0.5], &[0.6, 0.5]]);
        let total = train.total_samples() - train.class_set(1).unwrap().len();
        let sel = euclid_select_unrelated(&train, 1, &probe, total).unwrap();
        let nfs = nfs_unrelated(&train, 1).unwrap();
        let mut a: Vec<Vec<f64>> = (0..sel.len()).map(|j| sel.samples.col(j)).collect();
        let mut b: Vec<Vec<f64>> = (0..nfs.len()).map(|j| nfs.samples.col(j)).collect();
        let key = |v: &Vec<f64>| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        a.sort_by_key(key);
        b.sort_by_key(key);
        assert_eq!(a, b);
    }

    #[test]
    fn euclid_select_tie_prefers_smaller_class() {
        let train = Dataset::new(vec![
            set(0, &[&[1.0, 1.0]]),
            set(1, &[&[-1.0, -1.0]]),
            set(2, &[&[5.0, 5.0], &[5.0, 5.0]]),
        ])
        .unwrap();
        let probe = set(2, &[&[0.0, 0.0], &[0.0, 0.0]]);
        let u = euclid_select_unrelated(&train, 2, &probe, 1).unwrap();
        assert_eq!(u.samples.col(0), vec![1.0, 1.0]);
    }

    #[test]
    fn euclid_select_not_enough_samples() {
        let train = toy_train();
        let probe = set(0, &[&[0.0, 0.0], &[0.1, 0.0]]);
        assert!(matches!(
            euclid_select_unrelated(&train, 0, &probe, 5),
            Err(Error::NotEnoughSamples { .. })
        ));
    }

    fn pools(c: usize, per_class: usize, d: usize, seed: u64) -> SamplePools {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..c)
            .map(|_| {
                (0..per_class)
                    .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn random_split_exact_partition() {
        let p = pools(2, 9, 3, 4);
        let (tr, va, te) = random_split(&p, (3, 3, 3), 7).unwrap();
        for class in 0..2 {
            let mut drawn: Vec<Vec<u64>> = Vec::new();
            for ds in [&tr, &va, &te] {
                let s = ds.class_set(class).unwrap();
                assert_eq!(s.len(), 3);
                for j in 0..3 {
                    drawn.push(s.samples.col(j).iter().map(|x| x.to_bits()).collect());
                }
            }
            drawn.sort();
            let mut orig: Vec<Vec<u64>> = p[class]
                .iter()
                .map(|v| v.iter().map(|x| x.to_bits()).collect())
                .collect();
            orig.sort();
            assert_eq!(drawn, orig);
        }
    }

    #[test]
    fn random_split_deterministic() {
        let p = pools(3, 12, 4, 5);
        let (a, _, _) = random_split(&p, (3, 3, 3), 99).unwrap();
        let (b, _, _) = random_split(&p, (3, 3, 3), 99).unwrap();
        for class in 0..3 {
            let (sa, sb) = (a.class_set(class).unwrap(), b.class_set(class).unwrap());
            for j in 0..3 {
                assert_eq!(sa.samples.col(j), sb.samples.col(j));
            }
        }
    }

    #[test]
    fn random_split_seed_sensitivity() {
        let p = pools(2, 30, 4, 6);
        let (a, _, _) = random_split(&p, (3, 3, 3), 1).unwrap();
        let (b, _, _) = random_split(&p, (3, 3, 3), 2).unwrap();
        let differs = (0..2).any(|class| {
            let (sa, sb) = (a.class_set(class).unwrap(), b.class_set(class).unwrap());
            (0..3).any(|j| sa.samples.col(j) != sb.samples.col(j))
        });
        assert!(differs);
    }

    #[test]
    fn random_split_rejects_short_pool() {
        let p = pools(2, 5, 3, 8);
        assert!(matches!(
            random_split(&p, (3, 3, 3), 0),
            Err(Error::NotEnoughSamples { .. })
        ));
    }
}
