use std::path::PathBuf;

use anyhow::bail;
use clap::Args;
use uiqa_core::eval::{make_splits, SplitScheme};
use uiqa_core::manifest::DatasetManifest;

#[derive(Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// `kfold:<k>` or `holdout:<train_fraction>` (e.g. kfold:10, holdout:0.8).
    #[arg(long, default_value = "kfold:10")]
    pub scheme: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_scheme(text: &str) -> anyhow::Result<SplitScheme> {
    match text.split_once(':') {
        Some(("kfold", k)) => Ok(SplitScheme::KFold { k: k.parse()? }),
        Some(("holdout", f)) => Ok(SplitScheme::Holdout {
            train_fraction: f.parse()?,
        }),
        _ => bail!("scheme must be kfold:<k> or holdout:<fraction>, got '{text}'"),
    }
}

pub fn run(args: &SplitArgs) -> anyhow::Result<()> {
    let scheme = parse_scheme(&args.scheme)?;
    super::prepare_out_dir(
        &args.out,
        "split",
        serde_json::json!({
            "manifest": args.manifest.display().to_string(),
            "scheme": args.scheme,
            "seed": args.seed,
        }),
    )?;
    let manifest = DatasetManifest::load(&args.manifest)?;
    let plan = make_splits(&manifest, scheme, args.seed)?;
    let path = args.out.join("splits.json");
    plan.save(&path)?;
    println!("{} fold(s) -> {}", plan.folds.len(), path.display());
    Ok(())
}
