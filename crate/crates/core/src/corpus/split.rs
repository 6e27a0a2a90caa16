use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::manifest::Manifest;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitScheme {
    /// 80 % train, 20 % test.
    Holdout,
    Cv5,
    Cv10,
}

impl SplitScheme {
    /// Number of stratified partitions the scheme is built from.
    pub fn partitions(self) -> usize {
        match self {
            SplitScheme::Holdout | SplitScheme::Cv5 => 5,
            SplitScheme::Cv10 => 10,
        }
    }
}

impl fmt::Display for SplitScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitScheme::Holdout => "holdout",
            SplitScheme::Cv5 => "cv5",
            SplitScheme::Cv10 => "cv10",
        })
    }
}

impl FromStr for SplitScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "holdout" | "holdout_80_20" => Ok(SplitScheme::Holdout),
            "cv5" => Ok(SplitScheme::Cv5),
            "cv10" => Ok(SplitScheme::Cv10),
            _ => Err(Error::InvalidArgument(format!("unknown split scheme {:?}", s))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPlan {
    pub scheme: SplitScheme,
    pub seed: u64,
    pub folds: Vec<Fold>,
}

/// Stratified, seeded partition of the manifest by utterance.
pub fn make_splits(manifest: &Manifest, scheme: SplitScheme, seed: u64) -> Result<SplitPlan> {
    make_splits_for_labels(&manifest.label_indices(), manifest.n_classes(), scheme, seed)
}

/// Each class is shuffled and the classes are dealt round-robin, in class
/// order, onto `k` partitions with one running counter. Per-class partition
/// sizes then differ by at most one, as do the partition totals.
pub fn make_splits_for_labels(labels: &[usize], n_classes: usize, scheme: SplitScheme, seed: u64) -> Result<SplitPlan> {
    let k = scheme.partitions();
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        if l >= n_classes {
            return Err(Error::InvalidArgument(format!("label {} out of range", l)));
        }
        by_class[l].push(i);
    }
    for (c, members) in by_class.iter().enumerate() {
        if !members.is_empty() && members.len() < k {
            return Err(Error::Data(format!(
                "class {} has {} samples, fewer than the {} partitions of {}",
                c,
                members.len(),
                k,
                scheme
            )));
        }
    }
    if labels.is_empty() {
        return Err(Error::Data("cannot split an empty dataset".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut partition = vec![0usize; labels.len()];
    let mut counter = 0usize;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            partition[i] = counter % k;
            counter += 1;
        }
    }

    let fold = |f: usize| Fold {
        train: (0..labels.len()).filter(|&i| partition[i] != f).collect(),
        test: (0..labels.len()).filter(|&i| partition[i] == f).collect(),
    };
    let folds = match scheme {
        SplitScheme::Holdout => vec![fold(0)],
        _ => (0..k).map(fold).collect(),
    };
    Ok(SplitPlan { scheme, seed, folds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cv5_on_ten_samples() {
        let labels = vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let plan = make_splits_for_labels(&labels, 2, SplitScheme::Cv5, 3).unwrap();
        assert_eq!(plan.folds.len(), 5);
        assert!(plan.folds.iter().all(|f| f.test.len() == 2 && f.train.len() == 8));
    }

    #[test]
    fn holdout_is_80_20() {
        let labels: Vec<usize> = (0..100).map(|i| i % 4).collect();
        let plan = make_splits_for_labels(&labels, 4, SplitScheme::Holdout, 9).unwrap();
        assert_eq!(plan.folds.len(), 1);
        assert_eq!((plan.folds[0].train.len(), plan.folds[0].test.len()), (80, 20));
    }

    #[test]
    fn cv10_test_folds_partition_everything() {
        let labels: Vec<usize> = (0..57).map(|i| (i * 7) % 3).collect();
        let plan = make_splits_for_labels(&labels, 3, SplitScheme::Cv10, 1).unwrap();
        let mut all: Vec<usize> = plan.folds.iter().flat_map(|f| f.test.clone()).collect();
        all.sort();
        assert_eq!(all, (0..57).collect::<Vec<_>>());
    }

    #[test]
    fn too_small_class_is_rejected() {
        let labels = vec![0, 0, 0, 0, 0, 1, 1];
        assert!(make_splits_for_labels(&labels, 2, SplitScheme::Cv5, 0).is_err());
    }
}
