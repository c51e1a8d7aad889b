use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use uiqa_core::distortion::{generate_distorted_set, BoxRect, DistortConfig, DistortionKind};
use uiqa_core::manifest::DatasetManifest;

use crate::config::FileConfig;

#[derive(Args)]
pub struct DistortArgs {
    /// Manifest of reference images (JSON).
    #[arg(long)]
    pub refs: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Master seed; per-image seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated distortion kinds (default: all six).
    #[arg(long, value_delimiter = ',')]
    pub types: Option<Vec<String>>,
    /// JSON sidecar of foreground boxes: {"image_id": [[x, y, w, h], ...]}.
    #[arg(long)]
    pub boxes: Option<PathBuf>,
    /// Feather band in pixels for region masks.
    #[arg(long)]
    pub feather: Option<u32>,
    /// TOML config file ([distort] section).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_kinds(names: &[String]) -> anyhow::Result<Vec<DistortionKind>> {
    names
        .iter()
        .map(|n| n.parse::<DistortionKind>().map_err(Into::into))
        .collect()
}

pub fn run(args: &DistortArgs) -> anyhow::Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let mut config = DistortConfig::default();

    if let Some(levels) = &file.distort.levels {
        for (name, rows) in levels {
            let kind: DistortionKind = name.parse()?;
            config.levels.insert(kind, rows.clone());
        }
    }
    if let Some(types) = &file.distort.types {
        config.kinds = parse_kinds(types)?;
    }
    if let Some(feather) = file.distort.feather {
        config.feather = feather;
    }
    // flags win over the file
    if let Some(types) = &args.types {
        config.kinds = parse_kinds(types)?;
    }
    if let Some(feather) = args.feather {
        config.feather = feather;
    }
    if let Some(boxes_path) = &args.boxes {
        let text = std::fs::read_to_string(boxes_path)
            .with_context(|| format!("reading boxes sidecar {}", boxes_path.display()))?;
        let raw: BTreeMap<String, Vec<[u32; 4]>> = serde_json::from_str(&text)
            .with_context(|| format!("parsing boxes sidecar {}", boxes_path.display()))?;
        config.boxes = raw
            .into_iter()
            .map(|(id, boxes)| {
                (
                    id,
                    boxes
                        .into_iter()
                        .map(|[x, y, w, h]| BoxRect::new(x, y, w, h))
                        .collect(),
                )
            })
            .collect();
    }

    let kind_names: Vec<&str> = config.kinds.iter().map(|k| k.name()).collect();
    super::prepare_out_dir(
        &args.out,
        "distort",
        serde_json::json!({
            "refs": args.refs.display().to_string(),
            "seed": args.seed,
            "types": kind_names,
            "feather": config.feather,
            "boxes": args.boxes.as_ref().map(|p| p.display().to_string()),
            "levels": config
                .levels
                .iter()
                .map(|(k, v)| (k.name().to_string(), v.clone()))
                .collect::<BTreeMap<String, Vec<Vec<f64>>>>(),
        }),
    )?;

    let refs = DatasetManifest::load(&args.refs)?;
    let refs_dir = super::parent_dir(&args.refs);
    let manifest = generate_distorted_set(&refs, &refs_dir, &config, args.seed, &args.out)?;
    manifest.save(args.out.join("manifest.json"))?;
    println!(
        "distorted {} references into {} entries -> {}",
        refs.entries.len(),
        manifest.entries.len(),
        args.out.join("manifest.json").display()
    );
    Ok(())
}
