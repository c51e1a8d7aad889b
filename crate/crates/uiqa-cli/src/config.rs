//! Optional TOML configuration file. Resolution order is always
//! flags > file > built-in defaults; commands read their own section.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub distort: DistortSection,
    #[serde(default)]
    pub evaluate: EvaluateSection,
    #[serde(default)]
    pub score: ScoreSection,
    #[serde(default)]
    pub nontarget: NontargetSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistortSection {
    pub types: Option<Vec<String>>,
    pub feather: Option<u32>,
    /// Parameter rows per level, keyed by distortion kind name.
    pub levels: Option<BTreeMap<String, Vec<Vec<f64>>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateSection {
    pub c0_mode: Option<String>,
    pub c0_theta: Option<f64>,
    pub c0_subset_per_type: Option<usize>,
    pub subset_seed: Option<u64>,
    pub alpha: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreSection {
    pub metrics: Option<Vec<String>>,
    pub include_references: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NontargetSection {
    pub threshold: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(FileConfig::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config file {}", path.display()))?;
                toml::from_str(&text)
                    .with_context(|| format!("parsing config file {}", path.display()))
            }
        }
    }
}
