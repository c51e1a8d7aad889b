//! Content-disjoint train/test splits: content groups (never individual
//! images) are partitioned, so every distorted image travels with its
//! reference.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::DatasetManifest;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitScheme {
    /// Single fold with `floor(train_fraction * G)` training groups.
    Holdout { train_fraction: f64 },
    /// `k` folds, each group tested exactly once.
    KFold { k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<String>,
    pub test: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub folds: Vec<Fold>,
    /// image_id -> content_group_id for every image in the plan.
    pub groups: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct SplitFile {
    version: u32,
    folds: Vec<Fold>,
    groups: BTreeMap<String, String>,
}

impl SplitPlan {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = SplitFile {
            version: 1,
            folds: self.folds.clone(),
            groups: self.groups.clone(),
        };
        let text = serde_json::to_string_pretty(&file).expect("plan serializes");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: SplitFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line() as u64,
            reason: e.to_string(),
        })?;
        Ok(SplitPlan {
            folds: file.folds,
            groups: file.groups,
        })
    }

    /// Train/test group sets are disjoint in every fold.
    pub fn check_disjoint(&self) -> Result<()> {
        for (i, fold) in self.folds.iter().enumerate() {
            let train_groups: BTreeSet<&String> =
                fold.train.iter().filter_map(|id| self.groups.get(id)).collect();
            let test_groups: BTreeSet<&String> =
                fold.test.iter().filter_map(|id| self.groups.get(id)).collect();
            if train_groups.intersection(&test_groups).next().is_some() {
                return Err(Error::invalid(format!(
                    "fold {i} has content groups on both sides"
                )));
            }
        }
        Ok(())
    }
}

/// Deterministic group-level split of the manifest. Groups are sorted,
/// shuffled by a ChaCha stream seeded with `seed`, and partitioned; images
/// then follow their groups.
pub fn make_splits(
    manifest: &DatasetManifest,
    scheme: SplitScheme,
    seed: u64,
) -> Result<SplitPlan> {
    let groups_map = manifest.group_map();
    let mut group_ids: Vec<String> = groups_map
        .values()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    group_ids.shuffle(&mut rng);
    let n_groups = group_ids.len();

    let mut images_of: BTreeMap<&String, Vec<&String>> = BTreeMap::new();
    for (image, group) in &groups_map {
        images_of.entry(group).or_default().push(image);
    }
    let materialize = |selected: &BTreeSet<&String>| -> Vec<String> {
        let mut images: Vec<String> = selected
            .iter()
            .flat_map(|g| images_of[*g].iter().map(|s| (*s).clone()))
            .collect();
        images.sort();
        images
    };

    let group_folds: Vec<(BTreeSet<&String>, BTreeSet<&String>)> = match scheme {
        SplitScheme::Holdout { train_fraction } => {
            if !(0.0..1.0).contains(&train_fraction) || train_fraction <= 0.0 {
                return Err(Error::invalid("train fraction must lie in (0, 1)"));
            }
            let n_train = (train_fraction * n_groups as f64).floor() as usize;
            if n_train == 0 || n_train == n_groups {
                return Err(Error::invalid(format!(
                    "holdout of {n_groups} groups at {train_fraction} leaves an empty side"
                )));
            }
            let train: BTreeSet<&String> = group_ids[..n_train].iter().collect();
            let test: BTreeSet<&String> = group_ids[n_train..].iter().collect();
            vec![(train, test)]
        }
        SplitScheme::KFold { k } => {
            if k < 2 {
                return Err(Error::invalid("k-fold requires k >= 2"));
            }
            if n_groups < k {
                return Err(Error::invalid(format!(
                    "{n_groups} content groups cannot fill {k} folds"
                )));
            }
            // First (G mod k) folds take the larger chunk.
            let base = n_groups / k;
            let extra = n_groups % k;
            let mut folds = Vec::with_capacity(k);
            let mut cursor = 0;
            for fold in 0..k {
                let size = base + usize::from(fold < extra);
                let test: BTreeSet<&String> = group_ids[cursor..cursor + size].iter().collect();
                let train: BTreeSet<&String> = group_ids
                    .iter()
                    .filter(|g| !test.contains(*g))
                    .collect();
                folds.push((train, test));
                cursor += size;
            }
            folds
        }
    };

    let folds = group_folds
        .iter()
        .map(|(train, test)| Fold {
            train: materialize(train),
            test: materialize(test),
        })
        .collect();
    let plan = SplitPlan {
        folds,
        groups: groups_map,
    };
    plan.check_disjoint()?;
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::ManifestEntry;

    fn synthetic_manifest(n_groups: usize, images_per_group: usize) -> DatasetManifest {
        let mut entries = Vec::new();
        for g in 0..n_groups {
            let ref_id = format!("ref_{g:03}");
            entries.push(ManifestEntry::reference(
                ref_id.clone(),
                format!("{ref_id}.png"),
                format!("grp_{g:03}"),
            ));
            for i in 1..images_per_group {
                entries.push(ManifestEntry {
                    image_id: format!("{ref_id}_d{i}"),
                    path: format!("{ref_id}_d{i}.png"),
                    content_group_id: format!("grp_{g:03}"),
                    is_reference: false,
                    is_target: true,
                    distortion: None,
                    reference_id: Some(ref_id.clone()),
                });
            }
        }
        DatasetManifest::new(entries).unwrap()
    }

    #[test]
    fn ten_groups_kfold_ten_tests_one_group_each() {
        let manifest = synthetic_manifest(10, 3);
        let plan = make_splits(&manifest, SplitScheme::KFold { k: 10 }, 1).unwrap();
        assert_eq!(plan.folds.len(), 10);
        for fold in &plan.folds {
            let test_groups: BTreeSet<&String> =
                fold.test.iter().map(|id| &plan.groups[id]).collect();
            assert_eq!(test_groups.len(), 1);
            assert_eq!(fold.test.len(), 3);
            assert_eq!(fold.train.len(), 27);
        }
    }

    #[test]
    fn every_group_is_tested_exactly_once() {
        let manifest = synthetic_manifest(23, 2);
        let plan = make_splits(&manifest, SplitScheme::KFold { k: 10 }, 9).unwrap();
        let mut seen: BTreeMap<&String, usize> = BTreeMap::new();
        for fold in &plan.folds {
            for id in &fold.test {
                *seen.entry(&plan.groups[id]).or_default() += 1;
            }
        }
        assert_eq!(seen.len(), 23);
        // counted per image: 2 images per group, each group in one fold
        assert!(seen.values().all(|&c| c == 2));
    }

    #[test]
    fn holdout_145_groups_gives_116_29() {
        let manifest = synthetic_manifest(145, 2);
        let plan = make_splits(
            &manifest,
            SplitScheme::Holdout {
                train_fraction: 0.8,
            },
            42,
        )
        .unwrap();
        assert_eq!(plan.folds.len(), 1);
        let train_groups: BTreeSet<&String> = plan.folds[0]
            .train
            .iter()
            .map(|id| &plan.groups[id])
            .collect();
        let test_groups: BTreeSet<&String> = plan.folds[0]
            .test
            .iter()
            .map(|id| &plan.groups[id])
            .collect();
        assert_eq!(train_groups.len(), 116);
        assert_eq!(test_groups.len(), 29);

        // reproducible across runs
        let again = make_splits(
            &manifest,
            SplitScheme::Holdout {
                train_fraction: 0.8,
            },
            42,
        )
        .unwrap();
        assert_eq!(plan, again);
        // and different under another seed
        let other = make_splits(
            &manifest,
            SplitScheme::Holdout {
                train_fraction: 0.8,
            },
            43,
        )
        .unwrap();
        assert_ne!(plan.folds[0].test, other.folds[0].test);
    }

    #[test]
    fn disjointness_holds() {
        let manifest = synthetic_manifest(12, 4);
        let plan = make_splits(&manifest, SplitScheme::KFold { k: 5 }, 3).unwrap();
        plan.check_disjoint().unwrap();
    }

    #[test]
    fn fewer_groups_than_folds_errors() {
        let manifest = synthetic_manifest(4, 2);
        assert!(make_splits(&manifest, SplitScheme::KFold { k: 10 }, 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("splits.json");
        let manifest = synthetic_manifest(10, 2);
        let plan = make_splits(&manifest, SplitScheme::KFold { k: 5 }, 7).unwrap();
        plan.save(&path).unwrap();
        assert_eq!(SplitPlan::load(&path).unwrap(), plan);
    }
}
