//! Non-target analysis: a clean image without any target is low-utility by
//! definition, so a good utility model should push its score under the
//! low-quality threshold (40 on the 0-100 scale).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifest::DatasetManifest;
use crate::metrics::ScoreTable;

#[derive(Debug, Clone, Serialize)]
pub struct NontargetViolator {
    pub image_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NontargetReport {
    pub model: String,
    pub threshold: f64,
    pub n_nontarget: usize,
    /// Fraction of non-target images scored strictly below the threshold.
    pub fraction_below: f64,
    /// Non-target images the model failed to keep below the threshold.
    pub violators: Vec<NontargetViolator>,
}

/// Scores are interpreted on the 0-100 MOS scale.
pub fn nontarget_report(
    scores: &ScoreTable,
    manifest: &DatasetManifest,
    threshold: f64,
) -> Result<NontargetReport> {
    let mut n = 0usize;
    let mut below = 0usize;
    let mut violators = Vec::new();
    for entry in manifest.non_targets() {
        let score = scores.get(&entry.image_id).ok_or_else(|| {
            Error::invalid(format!(
                "model '{}' has no score for non-target image '{}'",
                scores.model_name, entry.image_id
            ))
        })?;
        n += 1;
        if score < threshold {
            below += 1;
        } else {
            violators.push(NontargetViolator {
                image_id: entry.image_id.clone(),
                score,
            });
        }
    }
    if n == 0 {
        return Err(Error::invalid("manifest has no non-target entries"));
    }
    Ok(NontargetReport {
        model: scores.model_name.clone(),
        threshold,
        n_nontarget: n,
        fraction_below: below as f64 / n as f64,
        violators,
    })
}
