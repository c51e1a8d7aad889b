use std::path::PathBuf;

use anyhow::bail;
use clap::Args;
use uiqa_core::eval::{evaluate, C0Mode, EvalOptions, SplitPlan, C0_DEFAULT_THETA};
use uiqa_core::manifest::DatasetManifest;
use uiqa_core::metrics::ScoreTable;
use uiqa_core::subjective::MosTable;

use crate::config::FileConfig;

#[derive(Args)]
pub struct EvaluateArgs {
    /// Score CSVs (model,image_id,score); a file may hold several models.
    #[arg(long, value_delimiter = ',', required = true)]
    pub scores: Vec<PathBuf>,
    /// MOS CSV produced by `uiqa mos`.
    #[arg(long)]
    pub mos: PathBuf,
    /// Split plan produced by `uiqa split`.
    #[arg(long)]
    pub splits: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Dataset manifest; required for per-type C0 subsetting.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// `sign` (default) or `threshold`.
    #[arg(long)]
    pub c0_mode: Option<String>,
    /// Threshold on min-max normalized score differences in threshold mode.
    #[arg(long)]
    pub c0_theta: Option<f64>,
    /// Sample at most this many test images per distortion type for C0.
    #[arg(long)]
    pub c0_subset: Option<usize>,
    /// Seed for the per-type C0 sampling.
    #[arg(long)]
    pub subset_seed: Option<u64>,
    /// Level of the pairwise model significance test.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// TOML config file ([evaluate] section).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: &EvaluateArgs) -> anyhow::Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let mode_name = args
        .c0_mode
        .clone()
        .or(file.evaluate.c0_mode)
        .unwrap_or_else(|| "sign".to_string());
    let theta = args
        .c0_theta
        .or(file.evaluate.c0_theta)
        .unwrap_or(C0_DEFAULT_THETA);
    let c0_mode = match mode_name.as_str() {
        "sign" => C0Mode::Sign,
        "threshold" => C0Mode::Threshold(theta),
        other => bail!("c0 mode must be 'sign' or 'threshold', got '{other}'"),
    };
    let opts = EvalOptions {
        c0_mode,
        c0_subset_per_type: args.c0_subset.or(file.evaluate.c0_subset_per_type),
        subset_seed: args.subset_seed.or(file.evaluate.subset_seed).unwrap_or(0),
        alpha: args.alpha.or(file.evaluate.alpha).unwrap_or(0.05),
    };

    super::prepare_out_dir(
        &args.out,
        "evaluate",
        serde_json::json!({
            "scores": args.scores.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "mos": args.mos.display().to_string(),
            "splits": args.splits.display().to_string(),
            "manifest": args.manifest.as_ref().map(|p| p.display().to_string()),
            "c0_mode": mode_name,
            "c0_theta": theta,
            "c0_subset_per_type": opts.c0_subset_per_type,
            "subset_seed": opts.subset_seed,
            "alpha": opts.alpha,
        }),
    )?;

    let mut tables: Vec<ScoreTable> = Vec::new();
    for path in &args.scores {
        tables.extend(ScoreTable::read_csv(path)?);
    }
    let mos = MosTable::from_csv(&args.mos)?;
    let plan = SplitPlan::load(&args.splits)?;
    let manifest = args
        .manifest
        .as_ref()
        .map(DatasetManifest::load)
        .transpose()?;

    let outcome = evaluate(&tables, &mos, &plan, manifest.as_ref(), &opts)?;
    outcome.report.write_json(args.out.join("report.json"))?;
    outcome.report.write_csv(args.out.join("report.csv"))?;
    if let Some(matrix) = &outcome.significance {
        matrix.write_csv(args.out.join("significance_matrix.csv"))?;
    }
    for model in &outcome.report.models {
        println!(
            "{}: plcc {:.4} (mapped {:.4}), srcc {:.4}, krcc {:.4}, c0 {:.4}",
            model.model,
            model.mean.plcc_raw,
            model.mean.plcc_mapped,
            model.mean.srcc,
            model.mean.krcc,
            model.mean.c0
        );
    }
    println!("report -> {}", args.out.join("report.json").display());
    Ok(())
}
