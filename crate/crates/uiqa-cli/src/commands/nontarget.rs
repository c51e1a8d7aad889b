use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use uiqa_core::eval::nontarget_report;
use uiqa_core::manifest::DatasetManifest;
use uiqa_core::metrics::ScoreTable;

use crate::config::FileConfig;

#[derive(Args)]
pub struct NontargetArgs {
    /// Score CSV on the 0-100 MOS scale.
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Low-quality threshold on the 0-100 scale.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Model to check when the CSV holds several.
    #[arg(long)]
    pub model: Option<String>,
    /// TOML config file ([nontarget] section).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: &NontargetArgs) -> anyhow::Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let threshold = args
        .threshold
        .or(file.nontarget.threshold)
        .unwrap_or(40.0);
    super::prepare_out_dir(
        &args.out,
        "nontarget",
        serde_json::json!({
            "scores": args.scores.display().to_string(),
            "manifest": args.manifest.display().to_string(),
            "threshold": threshold,
            "model": args.model,
        }),
    )?;

    let tables = ScoreTable::read_csv(&args.scores)?;
    let table = match &args.model {
        Some(name) => tables
            .into_iter()
            .find(|t| &t.model_name == name)
            .with_context(|| format!("model '{name}' not present in the score file"))?,
        None => {
            if tables.len() != 1 {
                bail!(
                    "score file holds {} models; pick one with --model",
                    tables.len()
                );
            }
            tables.into_iter().next().unwrap()
        }
    };
    let manifest = DatasetManifest::load(&args.manifest)?;
    let report = nontarget_report(&table, &manifest, threshold)?;

    std::fs::write(
        args.out.join("nontarget.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    let mut csv = String::from("image_id,score,below_threshold\n");
    for entry in manifest.non_targets() {
        let score = table.get(&entry.image_id).unwrap();
        csv.push_str(&format!(
            "{},{},{}\n",
            entry.image_id,
            score,
            score < threshold
        ));
    }
    std::fs::write(args.out.join("nontarget.csv"), csv)?;
    println!(
        "{}: {:.1}% of {} non-target images below {threshold}",
        report.model,
        report.fraction_below * 100.0,
        report.n_nontarget
    );
    Ok(())
}
