use std::path::PathBuf;

use clap::Args;
use uiqa_core::manifest::DatasetManifest;
use uiqa_core::metrics::{score_batch, write_timing_csv, MetricKind};

use crate::config::FileConfig;

#[derive(Args)]
pub struct ScoreArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated metric names (psnr, ssim, uciqe, uiqm).
    #[arg(long, value_delimiter = ',')]
    pub metrics: Option<Vec<String>>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also score reference entries (full-reference metrics score them
    /// against themselves).
    #[arg(long)]
    pub include_references: bool,
    /// TOML config file ([score] section).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: &ScoreArgs) -> anyhow::Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let metric_names: Vec<String> = args
        .metrics
        .clone()
        .or(file.score.metrics)
        .unwrap_or_else(|| MetricKind::ALL.iter().map(|m| m.name().to_string()).collect());
    let include_references = args.include_references
        || file.score.include_references.unwrap_or(false);
    let metrics: Vec<MetricKind> = metric_names
        .iter()
        .map(|n| n.parse::<MetricKind>())
        .collect::<Result<_, _>>()?;

    super::prepare_out_dir(
        &args.out,
        "score",
        serde_json::json!({
            "manifest": args.manifest.display().to_string(),
            "metrics": metric_names,
            "include_references": include_references,
        }),
    )?;

    let manifest = DatasetManifest::load(&args.manifest)?;
    let manifest_dir = super::parent_dir(&args.manifest);
    let batch = score_batch(&manifest, &manifest_dir, &metrics, include_references)?;
    for table in &batch.tables {
        let path = args.out.join(format!("scores_{}.csv", table.model_name));
        table.write_csv(&path)?;
        println!(
            "{}: {} images -> {}",
            table.model_name,
            table.scores.len(),
            path.display()
        );
    }
    let timing_path = args.out.join("timing.csv");
    write_timing_csv(&batch.timings, &timing_path)?;
    println!("timing -> {}", timing_path.display());
    Ok(())
}
