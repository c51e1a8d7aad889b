mod distort;
mod evaluate;
mod nontarget;
mod report;
mod score;
mod split;
mod subjective;

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Subcommand;

#[derive(Subcommand)]
pub enum Command {
    /// Generate the distorted dataset from a manifest of reference images.
    Distort(distort::DistortArgs),
    /// Compute per-image MOS statistics from a ratings CSV.
    Mos(subjective::MosArgs),
    /// Inter-rater agreement report (OC, NCC/EUD) from a ratings CSV.
    Agreement(subjective::AgreementArgs),
    /// Verification-set subject screening from a ratings CSV.
    Screen(subjective::ScreenArgs),
    /// Score a dataset with the classical metrics.
    Score(score::ScoreArgs),
    /// Build content-disjoint train/test splits.
    Split(split::SplitArgs),
    /// Run the full evaluation protocol over score tables.
    Evaluate(evaluate::EvaluateArgs),
    /// Check model scores on non-target images against a threshold.
    Nontarget(nontarget::NontargetArgs),
    /// Emit score-vs-MOS scatter and MOS histogram data (CSV + SVG).
    Report(report::ReportArgs),
}

impl Command {
    pub fn run(&self) -> anyhow::Result<()> {
        match self {
            Command::Distort(args) => distort::run(args),
            Command::Mos(args) => subjective::run_mos(args),
            Command::Agreement(args) => subjective::run_agreement(args),
            Command::Screen(args) => subjective::run_screen(args),
            Command::Score(args) => score::run(args),
            Command::Split(args) => split::run(args),
            Command::Evaluate(args) => evaluate::run(args),
            Command::Nontarget(args) => nontarget::run(args),
            Command::Report(args) => report::run(args),
        }
    }
}

/// Creates `--out` and records the fully resolved configuration there.
pub(crate) fn prepare_out_dir(
    out: &Path,
    subcommand: &str,
    resolved: serde_json::Value,
) -> anyhow::Result<()> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("creating output directory {}", out.display()))?;
    let provenance = serde_json::json!({
        "tool": "uiqa",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "resolved": resolved,
    });
    let path = out.join("run_config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&provenance)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub(crate) fn parent_dir(path: &Path) -> PathBuf {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}
