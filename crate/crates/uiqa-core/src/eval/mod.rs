//! The evaluation protocol: per-fold SRCC/PLCC/KRCC, logistic-mapped PLCC,
//! significance pairs and C0, cross-fold averaging, and the pairwise model
//! significance matrix.

mod c0;
mod correlation;
mod logistic;
mod nontarget;
mod normal;
mod pairs;
mod splits;

pub use c0::{
    c0, c0_outcomes, significance_matrix, C0Mode, Significance, SignificanceMatrix,
    C0_DEFAULT_THETA,
};
pub use correlation::{kendall, midranks, pearson, spearman};
pub use logistic::{fit_logistic, LogisticFit};
pub use nontarget::{nontarget_report, NontargetReport, NontargetViolator};
pub use normal::{erfc, normal_cdf};
pub use pairs::{pair_z, significant_pairs, SignificantPair, SignificantPairSet};
pub use splits::{make_splits, Fold, SplitPlan, SplitScheme};

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifest::DatasetManifest;
use crate::metrics::ScoreTable;
use crate::subjective::MosTable;

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub c0_mode: C0Mode,
    /// When set, C0 pairs are built from at most this many sampled test
    /// images per distortion kind (references and non-targets each count
    /// as their own kind). Requires a manifest.
    pub c0_subset_per_type: Option<usize>,
    pub subset_seed: u64,
    /// Level of the pairwise model significance test.
    pub alpha: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            c0_mode: C0Mode::Sign,
            c0_subset_per_type: None,
            subset_seed: 0,
            alpha: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub plcc_raw: f64,
    pub plcc_mapped: f64,
    pub srcc: f64,
    pub krcc: f64,
    pub c0: f64,
    pub n_images: usize,
    pub n_pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logistic: Option<[f64; 4]>,
    pub logistic_converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanMetrics {
    pub plcc_raw: f64,
    pub plcc_mapped: f64,
    pub srcc: f64,
    pub krcc: f64,
    pub c0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub model: String,
    pub folds: Vec<FoldMetrics>,
    pub mean: MeanMetrics,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub version: u32,
    pub models: Vec<ModelReport>,
}

impl EvalReport {
    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("report serializes");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    /// Flat CSV: `model,fold,plcc_raw,plcc_mapped,srcc,krcc,c0`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("model,fold,plcc_raw,plcc_mapped,srcc,krcc,c0\n");
        for model in &self.models {
            for f in &model.folds {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    model.model, f.fold, f.plcc_raw, f.plcc_mapped, f.srcc, f.krcc, f.c0
                ));
            }
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

pub struct EvalOutcome {
    pub report: EvalReport,
    /// Present when at least two models were evaluated.
    pub significance: Option<SignificanceMatrix>,
}

/// Replaces infinite sentinels (PSNR of identical images) by the extreme
/// finite value present, for the linear statistics that cannot digest
/// infinities. Rank statistics and C0 consume the raw scores.
fn clamp_sentinels(values: &[f64]) -> Vec<f64> {
    let max_finite = values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::MIN, f64::max);
    let min_finite = values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::MAX, f64::min);
    values
        .iter()
        .map(|&v| {
            if v == f64::INFINITY {
                max_finite
            } else if v == f64::NEG_INFINITY {
                min_finite
            } else {
                v
            }
        })
        .collect()
}

/// Test images for C0 pair construction, optionally subsampled per
/// distortion kind.
fn c0_image_subset(
    test_images: &[String],
    manifest: Option<&DatasetManifest>,
    opts: &EvalOptions,
    fold: usize,
) -> Result<Vec<String>> {
    let Some(per_type) = opts.c0_subset_per_type else {
        return Ok(test_images.to_vec());
    };
    let manifest = manifest.ok_or_else(|| {
        Error::invalid("per-type C0 subsetting requires the dataset manifest")
    })?;
    let mut by_kind: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for id in test_images {
        let entry = manifest
            .get(id)
            .ok_or_else(|| Error::invalid(format!("image '{id}' missing from manifest")))?;
        let kind = match (&entry.distortion, entry.is_target) {
            (Some(spec), _) => spec.kind.name().to_string(),
            (None, true) => "reference".to_string(),
            (None, false) => "non_target".to_string(),
        };
        by_kind.entry(kind).or_default().push(id.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.subset_seed.wrapping_add(fold as u64));
    let mut subset = Vec::new();
    for (_, mut ids) in by_kind {
        ids.shuffle(&mut rng);
        ids.truncate(per_type);
        subset.extend(ids);
    }
    subset.sort();
    Ok(subset)
}

/// Runs the full protocol: per fold and per model, PLCC (raw and
/// logistic-mapped), SRCC, KRCC, and C0 over significance pairs built
/// within the fold's test images; fold means per model; and, when several
/// models are present, the pairwise significance matrix over the pooled
/// per-pair outcomes.
pub fn evaluate(
    scores: &[ScoreTable],
    mos: &MosTable,
    plan: &SplitPlan,
    manifest: Option<&DatasetManifest>,
    opts: &EvalOptions,
) -> Result<EvalOutcome> {
    if scores.is_empty() {
        return Err(Error::invalid("no score tables to evaluate"));
    }
    plan.check_disjoint()?;

    let mut fold_metrics: BTreeMap<&str, Vec<FoldMetrics>> = BTreeMap::new();
    let mut pooled_outcomes: Vec<(String, Vec<bool>)> = scores
        .iter()
        .map(|t| (t.model_name.clone(), Vec::new()))
        .collect();

    for (fold_idx, fold) in plan.folds.iter().enumerate() {
        // Evaluation is restricted to test images that carry a MOS label
        // (non-target images are unrated by design).
        let test_images: Vec<String> = fold
            .test
            .iter()
            .filter(|id| mos.get(id).is_some())
            .cloned()
            .collect();
        if test_images.len() < 3 {
            return Err(Error::invalid(format!(
                "fold {fold_idx} has only {} MOS-labeled test images",
                test_images.len()
            )));
        }
        for table in scores {
            for id in &test_images {
                if table.get(id).is_none() {
                    return Err(Error::invalid(format!(
                        "model '{}' does not cover test image '{id}' of fold {fold_idx}",
                        table.model_name
                    )));
                }
            }
        }

        let mos_vec: Vec<f64> = test_images
            .iter()
            .map(|id| mos.get(id).unwrap().mos)
            .collect();
        let c0_images = c0_image_subset(&test_images, manifest, opts, fold_idx)?;
        let pair_set = significant_pairs(mos, &c0_images)?;

        for (table, pooled) in scores.iter().zip(&mut pooled_outcomes) {
            let pred: Vec<f64> = test_images.iter().map(|id| table.get(id).unwrap()).collect();
            let oriented: Vec<f64> = if table.higher_is_better {
                pred.clone()
            } else {
                pred.iter().map(|v| -v).collect()
            };
            let finite = clamp_sentinels(&oriented);

            let plcc_raw = pearson(&finite, &mos_vec)?;
            let srcc = spearman(&oriented, &mos_vec)?;
            let krcc = kendall(&oriented, &mos_vec)?;
            let fit = fit_logistic(&finite, &mos_vec)?;
            let plcc_mapped = if fit.converged {
                pearson(&fit.mapped, &mos_vec).unwrap_or(plcc_raw)
            } else {
                plcc_raw
            };
            let outcomes = c0_outcomes(table, &pair_set, opts.c0_mode)?;
            let c0_value =
                outcomes.iter().filter(|&&ok| ok).count() as f64 / outcomes.len() as f64;
            pooled.1.extend(outcomes);

            fold_metrics
                .entry(table.model_name.as_str())
                .or_default()
                .push(FoldMetrics {
                    fold: fold_idx,
                    plcc_raw,
                    plcc_mapped,
                    srcc,
                    krcc,
                    c0: c0_value,
                    n_images: test_images.len(),
                    n_pairs: pair_set.len(),
                    logistic: fit.beta,
                    logistic_converged: fit.converged,
                });
        }
    }

    let models = scores
        .iter()
        .map(|table| {
            let folds = fold_metrics.remove(table.model_name.as_str()).unwrap();
            let k = folds.len() as f64;
            let mean = MeanMetrics {
                plcc_raw: folds.iter().map(|f| f.plcc_raw).sum::<f64>() / k,
                plcc_mapped: folds.iter().map(|f| f.plcc_mapped).sum::<f64>() / k,
                srcc: folds.iter().map(|f| f.srcc).sum::<f64>() / k,
                krcc: folds.iter().map(|f| f.krcc).sum::<f64>() / k,
                c0: folds.iter().map(|f| f.c0).sum::<f64>() / k,
            };
            ModelReport {
                model: table.model_name.clone(),
                folds,
                mean,
            }
        })
        .collect();

    let significance = if scores.len() >= 2 {
        Some(significance_matrix(&pooled_outcomes, opts.alpha)?)
    } else {
        None
    };
    Ok(EvalOutcome {
        report: EvalReport { version: 1, models },
        significance,
    })
}
