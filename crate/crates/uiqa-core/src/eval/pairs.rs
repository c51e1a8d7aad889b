//! Significance-pair construction: image pairs whose MOS difference,
//! standardized by the per-image rating standard errors, clears the 95%
//! normal threshold.

use serde::Serialize;

use super::normal::normal_cdf;
use crate::error::{Error, Result};
use crate::subjective::{MosEntry, MosTable};

pub const SIGNIFICANCE_P: f64 = 0.95;

/// One significantly different pair with the subjectively better side
/// recorded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificantPair {
    pub better: String,
    pub worse: String,
    pub p: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SignificantPairSet {
    pub pairs: Vec<SignificantPair>,
}

impl SignificantPairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// The standardized MOS difference
/// `z = |MOS(i) - MOS(j)| / sqrt(var(i)/N(i) + var(j)/N(j))`.
///
/// MOS sits on the 0-100 scale while the variance is that of the raw 1-5
/// ratings. When both variances vanish the statistic is infinite for
/// unequal MOS and zero otherwise.
pub fn pair_z(a: &MosEntry, b: &MosEntry) -> f64 {
    let se2 = a.variance / a.n_raters as f64 + b.variance / b.n_raters as f64;
    let diff = (a.mos - b.mos).abs();
    if se2 == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / se2.sqrt()
    }
}

/// All unordered pairs of `images` with `Phi(z) > 0.95`, the better side
/// being the higher-MOS image.
pub fn significant_pairs(mos: &MosTable, images: &[String]) -> Result<SignificantPairSet> {
    let mut entries: Vec<(&String, &MosEntry)> = Vec::with_capacity(images.len());
    for id in images {
        let entry = mos.get(id).ok_or_else(|| {
            Error::invalid(format!("image '{id}' has no MOS/variance record"))
        })?;
        entries.push((id, entry));
    }
    let mut pairs = Vec::new();
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            let (id_i, e_i) = entries[i];
            let (id_j, e_j) = entries[j];
            let z = pair_z(e_i, e_j);
            let p = normal_cdf(z);
            if p > SIGNIFICANCE_P {
                let (better, worse) = if e_i.mos > e_j.mos {
                    (id_i, id_j)
                } else {
                    (id_j, id_i)
                };
                pairs.push(SignificantPair {
                    better: better.clone(),
                    worse: worse.clone(),
                    p,
                });
            }
        }
    }
    Ok(SignificantPairSet { pairs })
}
