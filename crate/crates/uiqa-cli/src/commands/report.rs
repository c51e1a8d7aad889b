use std::path::PathBuf;

use clap::Args;
use uiqa_core::metrics::ScoreTable;
use uiqa_core::subjective::MosTable;

use crate::svg;

#[derive(Args)]
pub struct ReportArgs {
    /// Score CSV (model,image_id,score).
    #[arg(long)]
    pub scores: PathBuf,
    /// MOS CSV.
    #[arg(long)]
    pub mos: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Histogram bin count over the 0-100 MOS axis.
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
}

pub fn run(args: &ReportArgs) -> anyhow::Result<()> {
    super::prepare_out_dir(
        &args.out,
        "report",
        serde_json::json!({
            "scores": args.scores.display().to_string(),
            "mos": args.mos.display().to_string(),
            "bins": args.bins,
        }),
    )?;
    let tables = ScoreTable::read_csv(&args.scores)?;
    let mos = MosTable::from_csv(&args.mos)?;

    // scatter: one CSV row per (model, image) with both coordinates known
    let mut csv = String::from("model,image_id,score,mos\n");
    let mut points: Vec<(f64, f64)> = Vec::new();
    for table in &tables {
        for (image_id, &score) in &table.scores {
            if let Some(entry) = mos.get(image_id) {
                csv.push_str(&format!(
                    "{},{image_id},{score},{}\n",
                    table.model_name, entry.mos
                ));
                points.push((score, entry.mos));
            }
        }
    }
    std::fs::write(args.out.join("scatter.csv"), csv)?;
    std::fs::write(
        args.out.join("scatter.svg"),
        svg::scatter(&points, "objective score vs MOS"),
    )?;

    // MOS histogram over [0, 100]
    let bins = args.bins.max(1);
    let width = 100.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    for (_, entry) in mos.iter() {
        let idx = ((entry.mos / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let rows: Vec<(f64, f64, usize)> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (i as f64 * width, (i + 1) as f64 * width, c))
        .collect();
    let mut hist_csv = String::from("bin_low,bin_high,count\n");
    for &(lo, hi, c) in &rows {
        hist_csv.push_str(&format!("{lo},{hi},{c}\n"));
    }
    std::fs::write(args.out.join("mos_histogram.csv"), hist_csv)?;
    std::fs::write(
        args.out.join("mos_histogram.svg"),
        svg::histogram(&rows, "MOS distribution"),
    )?;
    println!(
        "scatter ({} points) and histogram ({bins} bins) -> {}",
        points.len(),
        args.out.display()
    );
    Ok(())
}
