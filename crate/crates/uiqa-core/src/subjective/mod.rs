//! Subjective score processing: raw per-subject ratings to MOS labels,
//! plus the reliability statistics (outlier coefficient, inter-rater
//! NCC/EUD agreement, verification-set screening).
//!
//! A presentation id distinguishes repeated showings of the same image.
//! The lexicographically smallest presentation per `(subject, image)` is
//! the primary rating used for MOS and agreement; later presentations are
//! verification repeats used only by screening.

mod agreement;
mod screening;

pub use agreement::{rater_agreement, AgreementReport, PairAgreement};
pub use screening::{screen_subjects, ScreeningDecision};

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// One categorical utility rating on the 1..=5 scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rating {
    pub subject_id: String,
    pub image_id: String,
    pub presentation_id: String,
    pub score: u8,
}

/// All ratings of one experiment. Construction enforces the score range and
/// that no `(subject, presentation)` slot is rated twice.
#[derive(Debug, Clone, Default)]
pub struct RatingTable {
    ratings: Vec<Rating>,
}

impl RatingTable {
    pub fn new(ratings: Vec<Rating>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &ratings {
            if !(1..=5).contains(&r.score) {
                return Err(Error::invalid(format!(
                    "score {} for ({}, {}) outside 1..=5",
                    r.score, r.subject_id, r.image_id
                )));
            }
            if !seen.insert((
                r.subject_id.as_str(),
                r.image_id.as_str(),
                r.presentation_id.as_str(),
            )) {
                return Err(Error::invalid(format!(
                    "duplicate rating for subject '{}' presentation '{}/{}'",
                    r.subject_id, r.image_id, r.presentation_id
                )));
            }
        }
        Ok(RatingTable { ratings })
    }

    pub fn ratings(&self) -> &[Rating] {
        &self.ratings
    }

    pub fn subjects(&self) -> BTreeSet<&str> {
        self.ratings.iter().map(|r| r.subject_id.as_str()).collect()
    }

    pub fn images(&self) -> BTreeSet<&str> {
        self.ratings.iter().map(|r| r.image_id.as_str()).collect()
    }

    /// Primary rating per `(subject, image)`: the smallest presentation id.
    pub fn primary_ratings(&self) -> BTreeMap<(&str, &str), u8> {
        let mut best: BTreeMap<(&str, &str), (&str, u8)> = BTreeMap::new();
        for r in &self.ratings {
            let key = (r.subject_id.as_str(), r.image_id.as_str());
            match best.get(&key) {
                Some((pres, _)) if *pres <= r.presentation_id.as_str() => {}
                _ => {
                    best.insert(key, (r.presentation_id.as_str(), r.score));
                }
            }
        }
        best.into_iter().map(|(k, (_, s))| (k, s)).collect()
    }

    /// Images shown more than once (to at least one subject), with the
    /// duplicate presentation ids: the verification set.
    pub fn verification_pairs(&self) -> Vec<(String, String)> {
        let mut per_image: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for r in &self.ratings {
            per_image
                .entry(r.image_id.as_str())
                .or_default()
                .insert(r.presentation_id.as_str());
        }
        let mut pairs = Vec::new();
        for (image, presentations) in per_image {
            for dup in presentations.iter().skip(1) {
                pairs.push((image.to_string(), dup.to_string()));
            }
        }
        pairs
    }

    /// Reads the `subject_id,image_id,presentation_id,score` CSV (header
    /// mandatory, UTF-8, LF).
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            reason: e.to_string(),
        })?;
        let headers = reader
            .headers()
            .map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                reason: e.to_string(),
            })?
            .clone();
        let expected = ["subject_id", "image_id", "presentation_id", "score"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                reason: format!("expected header {expected:?}"),
            });
        }
        let mut ratings = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let line = i as u64 + 2;
            let record = record.map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line,
                reason: e.to_string(),
            })?;
            let score: u8 = record[3].trim().parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                reason: format!("malformed score '{}'", &record[3]),
            })?;
            ratings.push(Rating {
                subject_id: record[0].to_string(),
                image_id: record[1].to_string(),
                presentation_id: record[2].to_string(),
                score,
            });
        }
        RatingTable::new(ratings)
    }

    pub fn to_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("subject_id,image_id,presentation_id,score\n");
        for r in &self.ratings {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.subject_id, r.image_id, r.presentation_id, r.score
            ));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Per-image MOS statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct MosEntry {
    /// MOS on the 0-100 scale: `(raw_mean - 1) / 4 * 100`.
    pub mos: f64,
    pub raw_mean: f64,
    /// Sample variance of the raw 1-5 scores (N-1 denominator, 0 when N=1).
    pub variance: f64,
    pub n_raters: u32,
    /// Inter-quartile range of the raw scores, inclusive linear
    /// interpolation percentiles.
    pub iqr: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MosTable {
    entries: BTreeMap<String, MosEntry>,
}

impl MosTable {
    pub fn from_entries(entries: BTreeMap<String, MosEntry>) -> Self {
        MosTable { entries }
    }

    pub fn get(&self, image_id: &str) -> Option<&MosEntry> {
        self.entries.get(image_id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &MosEntry)> {
        self.entries.iter()
    }

    pub fn image_ids(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    /// Writes the `image_id,mos,raw_mean,variance,n_raters,iqr` CSV.
    pub fn to_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("image_id,mos,raw_mean,variance,n_raters,iqr\n");
        for (id, e) in &self.entries {
            out.push_str(&format!(
                "{id},{},{},{},{},{}\n",
                e.mos, e.raw_mean, e.variance, e.n_raters, e.iqr
            ));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            reason: e.to_string(),
        })?;
        let mut entries = BTreeMap::new();
        for (i, record) in reader.records().enumerate() {
            let line = i as u64 + 2;
            let bad = |reason: String| Error::Parse {
                path: path.to_path_buf(),
                line,
                reason,
            };
            let record = record.map_err(|e| bad(e.to_string()))?;
            if record.len() != 6 {
                return Err(bad(format!("expected 6 fields, got {}", record.len())));
            }
            let f = |idx: usize| -> Result<f64> {
                record[idx]
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("malformed number '{}'", &record[idx])))
            };
            entries.insert(
                record[0].to_string(),
                MosEntry {
                    mos: f(1)?,
                    raw_mean: f(2)?,
                    variance: f(3)?,
                    n_raters: f(4)? as u32,
                    iqr: f(5)?,
                },
            );
        }
        Ok(MosTable { entries })
    }
}

/// Percentile by inclusive linear interpolation between order statistics:
/// rank `(n - 1) * p` into the sorted sample.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if frac == 0.0 || lo + 1 == sorted.len() {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// Per-image mean/variance/count/IQR over each image's raters, using the
/// primary presentation of every `(subject, image)`.
///
/// Sums are accumulated as exact integers, so the result is invariant
/// under rater order.
pub fn compute_mos(ratings: &RatingTable) -> Result<MosTable> {
    let mut per_image: BTreeMap<&str, Vec<u8>> = BTreeMap::new();
    for ((_, image), score) in ratings.primary_ratings() {
        per_image.entry(image).or_default().push(score);
    }
    if per_image.is_empty() {
        return Err(Error::invalid("rating table is empty"));
    }
    let mut entries = BTreeMap::new();
    for (image, scores) in per_image {
        let n = scores.len() as u32;
        let sum: u64 = scores.iter().map(|&s| s as u64).sum();
        let sum_sq: u64 = scores.iter().map(|&s| (s as u64) * (s as u64)).sum();
        let raw_mean = sum as f64 / n as f64;
        let variance = if n > 1 {
            ((sum_sq as f64 - (sum as f64) * (sum as f64) / n as f64) / (n as f64 - 1.0)).max(0.0)
        } else {
            0.0
        };
        let mut sorted: Vec<f64> = scores.iter().map(|&s| s as f64).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let iqr = percentile(&sorted, 0.75) - percentile(&sorted, 0.25);
        entries.insert(
            image.to_string(),
            MosEntry {
                mos: (raw_mean - 1.0) / 4.0 * 100.0,
                raw_mean,
                variance,
                n_raters: n,
                iqr,
            },
        );
    }
    Ok(MosTable { entries })
}

/// Fraction of images whose rating IQR exceeds 1 (strictly) on the raw
/// 1-5 scale.
pub fn outlier_coefficient(mos: &MosTable) -> Result<f64> {
    if mos.is_empty() {
        return Err(Error::invalid("MOS table is empty"));
    }
    let outliers = mos.entries.values().filter(|e| e.iqr > 1.0).count();
    Ok(outliers as f64 / mos.len() as f64)
}
