use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use uiqa_core::subjective::{compute_mos, rater_agreement, screen_subjects, RatingTable};

#[derive(Args)]
pub struct MosArgs {
    /// Ratings CSV (subject_id,image_id,presentation_id,score).
    #[arg(long)]
    pub ratings: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run_mos(args: &MosArgs) -> anyhow::Result<()> {
    super::prepare_out_dir(
        &args.out,
        "mos",
        serde_json::json!({ "ratings": args.ratings.display().to_string() }),
    )?;
    let table = RatingTable::from_csv(&args.ratings)?;
    let mos = compute_mos(&table)?;
    let path = args.out.join("mos.csv");
    mos.to_csv(&path)?;
    println!("wrote MOS for {} images -> {}", mos.len(), path.display());
    Ok(())
}

#[derive(Args)]
pub struct AgreementArgs {
    #[arg(long)]
    pub ratings: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run_agreement(args: &AgreementArgs) -> anyhow::Result<()> {
    super::prepare_out_dir(
        &args.out,
        "agreement",
        serde_json::json!({ "ratings": args.ratings.display().to_string() }),
    )?;
    let table = RatingTable::from_csv(&args.ratings)?;
    let report = rater_agreement(&table)?;

    let json_path = args.out.join("agreement.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&report)? + "\n")
        .with_context(|| format!("writing {}", json_path.display()))?;

    let mut csv = String::from("subject_a,subject_b,ncc,eud,n_common\n");
    for p in &report.pairs {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            p.subject_a, p.subject_b, p.ncc, p.eud, p.n_common
        ));
    }
    std::fs::write(args.out.join("agreement_pairs.csv"), csv)?;
    println!(
        "OC {:.4}, mean NCC {:.4}, mean EUD {:.4} over {} rater pairs",
        report.oc,
        report.mean_ncc,
        report.mean_eud,
        report.pairs.len()
    );
    Ok(())
}

#[derive(Args)]
pub struct ScreenArgs {
    #[arg(long)]
    pub ratings: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Discard a subject when fluctuations exceed this count
    /// (default: ceil(verification_size / 2)).
    #[arg(long)]
    pub threshold: Option<u32>,
}

pub fn run_screen(args: &ScreenArgs) -> anyhow::Result<()> {
    super::prepare_out_dir(
        &args.out,
        "screen",
        serde_json::json!({
            "ratings": args.ratings.display().to_string(),
            "threshold": args.threshold,
        }),
    )?;
    let table = RatingTable::from_csv(&args.ratings)?;
    let decisions = screen_subjects(&table, args.threshold)?;
    let mut csv = String::from("subject_id,fluctuations,n_verification,keep\n");
    let mut discarded = 0;
    for d in &decisions {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            d.subject_id, d.fluctuations, d.n_verification, d.keep
        ));
        if !d.keep {
            discarded += 1;
        }
    }
    let path = args.out.join("screening.csv");
    std::fs::write(&path, csv)?;
    println!(
        "screened {} subjects, {discarded} discarded -> {}",
        decisions.len(),
        path.display()
    );
    Ok(())
}
