//! Classical comparison metrics (full-reference PSNR and SSIM,
//! no-reference UCIQE and UIQM) and batch scoring over a dataset manifest.

pub mod constants;
mod psnr;
mod ssim;
mod uciqe;
mod uiqm;

pub use psnr::psnr;
pub use ssim::ssim;
pub use uciqe::{uciqe, uciqe_terms, UciqeTerms};
pub use uiqm::{uiqm, uiqm_terms, UiqmTerms};

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{load_image, ImageBuffer};
use crate::manifest::{DatasetManifest, ManifestEntry};

/// Objective scores of one model over a dataset. `higher_is_better`
/// orients the C0 better/worse analysis; every bundled metric is
/// higher-better.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub model_name: String,
    pub scores: BTreeMap<String, f64>,
    pub higher_is_better: bool,
}

impl ScoreTable {
    pub fn new(model_name: impl Into<String>) -> Self {
        ScoreTable {
            model_name: model_name.into(),
            scores: BTreeMap::new(),
            higher_is_better: true,
        }
    }

    pub fn get(&self, image_id: &str) -> Option<f64> {
        self.scores.get(image_id).copied()
    }

    /// Writes the `model,image_id,score` CSV. Infinite PSNR sentinels are
    /// written as `inf`, which `f64::from_str` round-trips.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("model,image_id,score\n");
        for (image_id, score) in &self.scores {
            out.push_str(&format!("{},{image_id},{score}\n", self.model_name));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Reads a `model,image_id,score` CSV, grouping rows by model in order
    /// of first appearance. One file may carry several models.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<ScoreTable>> {
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
        if headers.iter().collect::<Vec<_>>() != ["model", "image_id", "score"] {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                reason: "expected header model,image_id,score".into(),
            });
        }
        let mut order: Vec<String> = Vec::new();
        let mut tables: BTreeMap<String, ScoreTable> = BTreeMap::new();
        for (i, record) in reader.records().enumerate() {
            let line = i as u64 + 2;
            let bad = |reason: String| Error::Parse {
                path: path.to_path_buf(),
                line,
                reason,
            };
            let record = record.map_err(|e| bad(e.to_string()))?;
            if record.len() != 3 {
                return Err(bad(format!("expected 3 fields, got {}", record.len())));
            }
            let model = record[0].to_string();
            let score: f64 = record[2]
                .trim()
                .parse()
                .map_err(|_| bad(format!("malformed score '{}'", &record[2])))?;
            let table = tables.entry(model.clone()).or_insert_with(|| {
                order.push(model.clone());
                ScoreTable::new(model)
            });
            if table.scores.insert(record[1].to_string(), score).is_some() {
                return Err(bad(format!("duplicate score for image '{}'", &record[1])));
            }
        }
        Ok(order.into_iter().map(|m| tables.remove(&m).unwrap()).collect())
    }
}

/// The bundled metrics, by CLI name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Psnr,
    Ssim,
    Uciqe,
    Uiqm,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::Psnr,
        MetricKind::Ssim,
        MetricKind::Uciqe,
        MetricKind::Uiqm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Psnr => "psnr",
            MetricKind::Ssim => "ssim",
            MetricKind::Uciqe => "uciqe",
            MetricKind::Uiqm => "uiqm",
        }
    }

    pub fn is_full_reference(&self) -> bool {
        matches!(self, MetricKind::Psnr | MetricKind::Ssim)
    }

    fn compute(&self, reference: Option<&ImageBuffer>, img: &ImageBuffer) -> Result<f64> {
        match self {
            MetricKind::Psnr => psnr(reference.expect("caller checks lineage"), img),
            MetricKind::Ssim => ssim(reference.expect("caller checks lineage"), img),
            MetricKind::Uciqe => uciqe(img),
            MetricKind::Uiqm => uiqm(img),
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

/// Mean wall-clock cost per image for one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub model: String,
    pub mean_ms_per_image: f64,
    pub n_images: usize,
}

pub fn write_timing_csv(timings: &[TimingRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("model,mean_ms_per_image\n");
    for t in timings {
        out.push_str(&format!("{},{}\n", t.model, t.mean_ms_per_image));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub struct ScoreBatch {
    pub tables: Vec<ScoreTable>,
    pub timings: Vec<TimingRecord>,
}

/// Scores every non-reference entry of the manifest with each requested
/// metric (references too when `include_references` is set; full-reference
/// metrics then score them against themselves). Images are processed in
/// parallel; tables are assembled by image id, independent of completion
/// order.
pub fn score_batch(
    manifest: &DatasetManifest,
    manifest_dir: &Path,
    metrics: &[MetricKind],
    include_references: bool,
) -> Result<ScoreBatch> {
    if metrics.is_empty() {
        return Err(Error::invalid("no metrics requested"));
    }
    let need_reference = metrics.iter().any(MetricKind::is_full_reference);
    let ref_paths: BTreeMap<&str, &ManifestEntry> = manifest
        .references()
        .map(|e| (e.image_id.as_str(), e))
        .collect();

    let targets: Vec<&ManifestEntry> = manifest
        .entries
        .iter()
        .filter(|e| include_references || !e.is_reference)
        .collect();
    if need_reference {
        for entry in targets.iter().filter(|e| !e.is_reference) {
            let ref_id = entry.reference_id.as_deref().unwrap_or_default();
            if !ref_paths.contains_key(ref_id) {
                return Err(Error::invalid(format!(
                    "full-reference metric requested but '{}' has no reference in the manifest",
                    entry.image_id
                )));
            }
        }
    }

    let results: Result<Vec<(String, Vec<(MetricKind, f64, f64)>)>> = targets
        .par_iter()
        .map(|entry| {
            let img = load_image(DatasetManifest::resolve_path(manifest_dir, entry))?;
            let reference = if need_reference {
                match (&entry.reference_id, entry.is_reference) {
                    (_, true) => Some(img.clone()),
                    (Some(ref_id), false) => Some(load_image(DatasetManifest::resolve_path(
                        manifest_dir,
                        ref_paths[ref_id.as_str()],
                    ))?),
                    (None, false) => None,
                }
            } else {
                None
            };
            let mut row = Vec::with_capacity(metrics.len());
            for &metric in metrics {
                let start = Instant::now();
                let score = metric.compute(reference.as_ref(), &img)?;
                row.push((metric, score, start.elapsed().as_secs_f64() * 1e3));
            }
            Ok((entry.image_id.clone(), row))
        })
        .collect();
    let results = results?;

    let mut tables: Vec<ScoreTable> = metrics
        .iter()
        .map(|m| ScoreTable::new(m.name()))
        .collect();
    let mut total_ms = vec![0.0f64; metrics.len()];
    for (image_id, row) in results {
        for (i, (_, score, ms)) in row.into_iter().enumerate() {
            tables[i].scores.insert(image_id.clone(), score);
            total_ms[i] += ms;
        }
    }
    let n = targets.len();
    let timings = metrics
        .iter()
        .zip(&total_ms)
        .map(|(m, &ms)| TimingRecord {
            model: m.name().to_string(),
            mean_ms_per_image: if n == 0 { 0.0 } else { ms / n as f64 },
            n_images: n,
        })
        .collect();
    Ok(ScoreBatch { tables, timings })
}
