//! Dataset manifest: the image inventory with reference/distortion lineage,
//! content groups, and target flags. Serialized as JSON with a top-level
//! `{"version": 1, "entries": [...]}` wrapper; entry paths are interpreted
//! relative to the manifest file's directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::distortion::DistortionSpec;
use crate::error::{Error, Result};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image_id: String,
    pub path: String,
    pub content_group_id: String,
    pub is_reference: bool,
    pub is_target: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distortion: Option<DistortionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_id: Option<String>,
}

impl ManifestEntry {
    pub fn reference(image_id: impl Into<String>, path: impl Into<String>, group: impl Into<String>) -> Self {
        ManifestEntry {
            image_id: image_id.into(),
            path: path.into(),
            content_group_id: group.into(),
            is_reference: true,
            is_target: true,
            distortion: None,
            reference_id: None,
        }
    }

    pub fn non_target(image_id: impl Into<String>, path: impl Into<String>, group: impl Into<String>) -> Self {
        ManifestEntry {
            is_target: false,
            ..ManifestEntry::reference(image_id, path, group)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

#[derive(Serialize, Deserialize)]
struct ManifestFile {
    version: u32,
    entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self> {
        let manifest = DatasetManifest { entries };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for entry in &self.entries {
            if !ids.insert(entry.image_id.as_str()) {
                return Err(Error::invalid(format!(
                    "duplicate image_id '{}' in manifest",
                    entry.image_id
                )));
            }
            if entry.is_reference && entry.distortion.is_some() {
                return Err(Error::invalid(format!(
                    "reference entry '{}' carries a distortion spec",
                    entry.image_id
                )));
            }
        }
        let groups: BTreeMap<&str, &str> = self
            .entries
            .iter()
            .filter(|e| e.is_reference)
            .map(|e| (e.image_id.as_str(), e.content_group_id.as_str()))
            .collect();
        for entry in self.entries.iter().filter(|e| !e.is_reference) {
            let ref_id = entry.reference_id.as_deref().ok_or_else(|| {
                Error::invalid(format!(
                    "distorted entry '{}' has no reference_id",
                    entry.image_id
                ))
            })?;
            match groups.get(ref_id) {
                None => {
                    return Err(Error::invalid(format!(
                        "entry '{}' names unknown reference '{}'",
                        entry.image_id, ref_id
                    )))
                }
                Some(&group) if group != entry.content_group_id => {
                    return Err(Error::invalid(format!(
                        "entry '{}' is in group '{}' but its reference is in '{}'",
                        entry.image_id, entry.content_group_id, group
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ManifestFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line() as u64,
            reason: e.to_string(),
        })?;
        if file.version != MANIFEST_VERSION {
            return Err(Error::invalid(format!(
                "unsupported manifest version {} (expected {MANIFEST_VERSION})",
                file.version
            )));
        }
        let manifest = DatasetManifest {
            entries: file.entries,
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = ManifestFile {
            version: MANIFEST_VERSION,
            entries: self.entries.clone(),
        };
        let text = serde_json::to_string_pretty(&file).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn get(&self, image_id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.image_id == image_id)
    }

    pub fn references(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| e.is_reference)
    }

    pub fn non_targets(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| !e.is_target)
    }

    /// Map image_id -> content_group_id for every entry.
    pub fn group_map(&self) -> BTreeMap<String, String> {
        self.entries
            .iter()
            .map(|e| (e.image_id.clone(), e.content_group_id.clone()))
            .collect()
    }

    /// Resolve an entry's path against the directory the manifest lives in.
    pub fn resolve_path(manifest_dir: &Path, entry: &ManifestEntry) -> PathBuf {
        let p = Path::new(&entry.path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            manifest_dir.join(p)
        }
    }
}
