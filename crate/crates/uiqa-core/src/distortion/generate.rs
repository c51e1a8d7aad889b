//! Batch generation of a distorted dataset from reference images.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::{
    apply_distortion, derive_seed, BoxRect, DistortionKind, DistortionSpec, RegionSpec,
};
use crate::error::{Error, Result};
use crate::image::{load_image, save_image};
use crate::manifest::{DatasetManifest, ManifestEntry};

/// Level tables per distortion kind. The defaults give four levels for the
/// first five kinds and two for ocean snow, severity increasing with level.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortConfig {
    pub kinds: Vec<DistortionKind>,
    pub levels: BTreeMap<DistortionKind, Vec<Vec<f64>>>,
    /// Feather band (pixels) for region masks.
    pub feather: u32,
    /// Foreground boxes per reference image id, required when `Region` is
    /// among the kinds.
    pub boxes: BTreeMap<String, Vec<BoxRect>>,
}

impl Default for DistortConfig {
    fn default() -> Self {
        let mut levels = BTreeMap::new();
        levels.insert(
            DistortionKind::Channel,
            vec![
                vec![0.85, 0.95, 1.0],
                vec![0.65, 0.90, 1.0],
                vec![0.45, 0.85, 1.0],
                vec![0.25, 0.80, 1.0],
            ],
        );
        levels.insert(
            DistortionKind::Contrast,
            vec![vec![0.8], vec![0.6], vec![0.4], vec![0.2]],
        );
        // Two dim and two glaring gains, interleaved so that error energy
        // grows strictly with the level index.
        levels.insert(
            DistortionKind::Illumination,
            vec![vec![0.75], vec![1.35], vec![0.5], vec![1.7]],
        );
        levels.insert(
            DistortionKind::MotionBlur,
            vec![vec![5.0], vec![9.0], vec![13.0], vec![17.0]],
        );
        // [strength, target]: levels 1-2 degrade the foreground, 3-4 the
        // background, each at strengths 1.0 and 1.6.
        levels.insert(
            DistortionKind::Region,
            vec![
                vec![1.0, 0.0],
                vec![1.6, 0.0],
                vec![1.0, 1.0],
                vec![1.6, 1.0],
            ],
        );
        levels.insert(
            DistortionKind::OceanSnow,
            vec![vec![150.0], vec![400.0]],
        );
        DistortConfig {
            kinds: DistortionKind::ALL.to_vec(),
            levels,
            feather: 4,
            boxes: BTreeMap::new(),
        }
    }
}

impl DistortConfig {
    pub fn level_count(&self, kind: DistortionKind) -> usize {
        self.levels.get(&kind).map_or(0, Vec::len)
    }

    /// Builds the spec for `(image, kind, level)`; `level` is 1-based.
    pub fn spec_for(
        &self,
        image_id: &str,
        kind: DistortionKind,
        level: u32,
        master_seed: u64,
    ) -> Result<DistortionSpec> {
        let table = self
            .levels
            .get(&kind)
            .ok_or_else(|| Error::invalid(format!("no level table for {}", kind.name())))?;
        let params = table
            .get(level as usize - 1)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "level {level} out of range for {} ({} levels configured)",
                    kind.name(),
                    table.len()
                ))
            })?
            .clone();
        let region = if kind == DistortionKind::Region {
            let boxes = self.boxes.get(image_id).ok_or_else(|| {
                Error::invalid(format!(
                    "region distortion requested but no boxes configured for '{image_id}'"
                ))
            })?;
            Some(RegionSpec {
                boxes: boxes.clone(),
                feather: self.feather,
            })
        } else {
            None
        };
        // Every generated entry gets a seed for provenance, even the
        // deterministic kinds that never draw from it.
        let spec = DistortionSpec {
            kind,
            level,
            params,
            region,
            seed: Some(derive_seed(master_seed, image_id, kind, level)),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Distorts every target reference of `refs` at all configured kinds and
/// levels, writing images under `out_dir` and returning the enlarged
/// manifest. References (and pass-through non-target images) are copied to
/// `out_dir/refs/`, distorted images to `out_dir/distorted/`; manifest
/// paths are relative to `out_dir`.
///
/// Per-entry seeds come from [`derive_seed`], so output is reproducible and
/// independent of the order entries are produced in.
pub fn generate_distorted_set(
    refs: &DatasetManifest,
    refs_dir: &Path,
    config: &DistortConfig,
    master_seed: u64,
    out_dir: &Path,
) -> Result<DatasetManifest> {
    if refs.entries.iter().any(|e| !e.is_reference) {
        return Err(Error::invalid(
            "input manifest must contain only reference entries",
        ));
    }
    let refs_out = out_dir.join("refs");
    let dist_out = out_dir.join("distorted");
    fs::create_dir_all(&refs_out).map_err(|e| Error::io(&refs_out, e))?;
    fs::create_dir_all(&dist_out).map_err(|e| Error::io(&dist_out, e))?;

    // Copy sources so the output tree is self-contained.
    let mut entries = Vec::new();
    for entry in &refs.entries {
        let src = DatasetManifest::resolve_path(refs_dir, entry);
        let file_name = format!("{}.png", entry.image_id);
        let dst = refs_out.join(&file_name);
        let img = load_image(&src)?;
        save_image(&img, &dst)?;
        entries.push(ManifestEntry {
            path: format!("refs/{file_name}"),
            ..entry.clone()
        });
    }

    // Non-target images are clean by definition and are not distorted.
    let work: Vec<(usize, DistortionKind, u32)> = refs
        .entries
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_target)
        .flat_map(|(i, _)| {
            config.kinds.iter().flat_map(move |&kind| {
                (1..=config.level_count(kind) as u32).map(move |level| (i, kind, level))
            })
        })
        .collect();

    let distorted: Result<Vec<ManifestEntry>> = work
        .par_iter()
        .map(|&(ref_idx, kind, level)| {
            let reference = &refs.entries[ref_idx];
            let spec = config.spec_for(&reference.image_id, kind, level, master_seed)?;
            let src = DatasetManifest::resolve_path(refs_dir, reference);
            let img = load_image(&src)?;
            let out = apply_distortion(&img, &spec)?;
            let image_id = format!("{}__{}_l{}", reference.image_id, kind.name(), level);
            let file_name = format!("{image_id}.png");
            save_image(&out, dist_out.join(&file_name))?;
            Ok(ManifestEntry {
                image_id,
                path: format!("distorted/{file_name}"),
                content_group_id: reference.content_group_id.clone(),
                is_reference: false,
                is_target: reference.is_target,
                distortion: Some(spec),
                reference_id: Some(reference.image_id.clone()),
            })
        })
        .collect();
    entries.extend(distorted?);

    DatasetManifest::new(entries)
}
