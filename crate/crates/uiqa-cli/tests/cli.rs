//! End-to-end checks of the `uiqa` binary: exit codes, output layout,
//! determinism, and cross-command interop.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use uiqa_core::image::save_image;
use uiqa_core::manifest::{DatasetManifest, ManifestEntry};
use uiqa_core::subjective::compute_mos;
use uiqa_core::synth;

fn uiqa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uiqa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "command failed: {}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Writes `n_refs` target scenes plus one non-target scene and the
/// matching manifest + boxes sidecar; returns the manifest path.
fn write_reference_dataset(dir: &Path, n_refs: usize) -> (PathBuf, PathBuf) {
    let mut entries = Vec::new();
    let mut boxes: BTreeMap<String, Vec<[u32; 4]>> = BTreeMap::new();
    for i in 0..n_refs {
        let id = format!("ref_{i:03}");
        let (img, target_boxes) = synth::scene(96, 72, 2, i as u64 + 1);
        save_image(&img, dir.join(format!("{id}.png"))).unwrap();
        boxes.insert(
            id.clone(),
            target_boxes.iter().map(|b| [b.x, b.y, b.w, b.h]).collect(),
        );
        entries.push(ManifestEntry::reference(
            id.clone(),
            format!("{id}.png"),
            format!("grp_{i:03}"),
        ));
    }
    let (nt, _) = synth::scene(96, 72, 0, 999);
    save_image(&nt, dir.join("nontarget_000.png")).unwrap();
    entries.push(ManifestEntry::non_target(
        "nontarget_000",
        "nontarget_000.png",
        "grp_nt",
    ));
    let manifest = DatasetManifest::new(entries).unwrap();
    let manifest_path = dir.join("refs.json");
    manifest.save(&manifest_path).unwrap();
    let boxes_path = dir.join("boxes.json");
    std::fs::write(&boxes_path, serde_json::to_string(&boxes).unwrap()).unwrap();
    (manifest_path, boxes_path)
}

fn tree_digest(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = uiqa(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let out = uiqa(&["mos", "--out", "/tmp/never"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = uiqa(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn nonexistent_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = uiqa(&[
        "mos",
        "--ratings",
        "/nonexistent/ratings.csv",
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn distort_is_deterministic_and_leaves_inputs_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let (refs, boxes) = write_reference_dataset(dir.path(), 2);
    let before = tree_digest(dir.path());

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let result = uiqa(&[
            "distort",
            "--refs",
            refs.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "7",
            "--boxes",
            boxes.to_str().unwrap(),
        ]);
        assert_ok(&result);
    }
    assert_eq!(tree_digest(&out_a), tree_digest(&out_b));

    // inputs untouched; everything new lives under the --out dirs
    let after: BTreeMap<String, Vec<u8>> = tree_digest(dir.path())
        .into_iter()
        .filter(|(k, _)| !k.starts_with("a/") && !k.starts_with("b/"))
        .collect();
    assert_eq!(before, after);
}

#[test]
fn thread_cap_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (refs, _) = write_reference_dataset(dir.path(), 2);
    let run = |out: &Path, threads: &str| {
        let result = Command::new(env!("CARGO_BIN_EXE_uiqa"))
            .env("UIQA_THREADS", threads)
            .args([
                "distort",
                "--refs",
                refs.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--seed",
                "5",
                "--types",
                "motion_blur,ocean_snow",
            ])
            .output()
            .unwrap();
        assert_ok(&result);
    };
    let single = dir.path().join("single");
    let many = dir.path().join("many");
    run(&single, "1");
    run(&many, "8");
    assert_eq!(tree_digest(&single), tree_digest(&many));
}

#[test]
fn distort_respects_type_selection_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let (refs, _) = write_reference_dataset(dir.path(), 1);
    let config = dir.path().join("uiqa.toml");
    std::fs::write(
        &config,
        "[distort]\ntypes = [\"contrast\", \"illumination\"]\n\n\
         [distort.levels]\ncontrast = [[0.9], [0.5]]\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    // flag overrides the file's type list; level table comes from the file
    let result = uiqa(&[
        "distort",
        "--refs",
        refs.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "1",
        "--config",
        config.to_str().unwrap(),
        "--types",
        "contrast",
    ]);
    assert_ok(&result);
    let manifest = DatasetManifest::load(out.join("manifest.json")).unwrap();
    // 1 target ref + 1 non-target + 2 contrast levels
    assert_eq!(manifest.entries.len(), 4);
    let run_config: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run_config.json")).unwrap())
            .unwrap();
    assert_eq!(run_config["resolved"]["types"], serde_json::json!(["contrast"]));
}

#[test]
fn full_pipeline_interop() {
    let dir = tempfile::tempdir().unwrap();
    let (refs, boxes) = write_reference_dataset(dir.path(), 4);

    let data = dir.path().join("data");
    assert_ok(&uiqa(&[
        "distort",
        "--refs",
        refs.to_str().unwrap(),
        "--out",
        data.to_str().unwrap(),
        "--seed",
        "11",
        "--boxes",
        boxes.to_str().unwrap(),
    ]));
    let manifest_path = data.join("manifest.json");
    let manifest = DatasetManifest::load(&manifest_path).unwrap();

    // synthetic raters stand in for the subjective experiment
    let ratings = synth::synthetic_ratings(&manifest, 15, 5, 23);
    let ratings_path = dir.path().join("ratings.csv");
    ratings.to_csv(&ratings_path).unwrap();

    let mos_out = dir.path().join("mos");
    assert_ok(&uiqa(&[
        "mos",
        "--ratings",
        ratings_path.to_str().unwrap(),
        "--out",
        mos_out.to_str().unwrap(),
    ]));

    let agree_out = dir.path().join("agree");
    assert_ok(&uiqa(&[
        "agreement",
        "--ratings",
        ratings_path.to_str().unwrap(),
        "--out",
        agree_out.to_str().unwrap(),
    ]));
    let agreement: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(agree_out.join("agreement.json")).unwrap(),
    )
    .unwrap();
    assert!(agreement["mean_ncc"].as_f64().unwrap() > 0.8);

    let screen_out = dir.path().join("screen");
    assert_ok(&uiqa(&[
        "screen",
        "--ratings",
        ratings_path.to_str().unwrap(),
        "--out",
        screen_out.to_str().unwrap(),
    ]));
    let screening = std::fs::read_to_string(screen_out.join("screening.csv")).unwrap();
    assert!(screening.starts_with("subject_id,fluctuations,n_verification,keep\n"));
    assert_eq!(screening.lines().count(), 16); // header + 15 subjects

    let scores_out = dir.path().join("scores");
    assert_ok(&uiqa(&[
        "score",
        "--manifest",
        manifest_path.to_str().unwrap(),
        "--metrics",
        "psnr,uciqe",
        "--include-references", // references carry MOS, so evaluate needs them scored
        "--out",
        scores_out.to_str().unwrap(),
    ]));

    let splits_out = dir.path().join("splits");
    assert_ok(&uiqa(&[
        "split",
        "--manifest",
        manifest_path.to_str().unwrap(),
        "--scheme",
        "kfold:2",
        "--seed",
        "5",
        "--out",
        splits_out.to_str().unwrap(),
    ]));

    let eval_out = dir.path().join("eval");
    assert_ok(&uiqa(&[
        "evaluate",
        "--scores",
        &format!(
            "{},{}",
            scores_out.join("scores_psnr.csv").display(),
            scores_out.join("scores_uciqe.csv").display()
        ),
        "--mos",
        mos_out.join("mos.csv").to_str().unwrap(),
        "--splits",
        splits_out.join("splits.json").to_str().unwrap(),
        "--out",
        eval_out.to_str().unwrap(),
    ]));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(eval_out.join("report.json")).unwrap())
            .unwrap();
    let models = report["models"].as_array().unwrap();
    assert_eq!(models.len(), 2);
    for model in models {
        assert_eq!(model["folds"].as_array().unwrap().len(), 2);
        let c0 = model["mean"]["c0"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&c0));
    }
    assert!(eval_out.join("significance_matrix.csv").exists());
    let report_csv = std::fs::read_to_string(eval_out.join("report.csv")).unwrap();
    assert!(report_csv.starts_with("model,fold,plcc_raw,plcc_mapped,srcc,krcc,c0\n"));
    assert_eq!(report_csv.lines().count(), 1 + 2 * 2);

    // an "external" model exporting MOS-scale scores feeds nontarget + report
    let mut external = String::from("model,image_id,score\n");
    let mos_table = compute_mos(&ratings).unwrap();
    for entry in &manifest.entries {
        let score = match mos_table.get(&entry.image_id) {
            Some(e) => e.mos * 0.9 + 3.0,
            None => 12.0, // non-targets predicted low
        };
        external.push_str(&format!("toy_model,{},{score}\n", entry.image_id));
    }
    let external_path = dir.path().join("external_scores.csv");
    std::fs::write(&external_path, external).unwrap();

    let nt_out = dir.path().join("nt");
    assert_ok(&uiqa(&[
        "nontarget",
        "--scores",
        external_path.to_str().unwrap(),
        "--manifest",
        manifest_path.to_str().unwrap(),
        "--out",
        nt_out.to_str().unwrap(),
    ]));
    let nt: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(nt_out.join("nontarget.json")).unwrap())
            .unwrap();
    assert_eq!(nt["fraction_below"].as_f64().unwrap(), 1.0);

    let report_out = dir.path().join("viz");
    assert_ok(&uiqa(&[
        "report",
        "--scores",
        external_path.to_str().unwrap(),
        "--mos",
        mos_out.join("mos.csv").to_str().unwrap(),
        "--out",
        report_out.to_str().unwrap(),
    ]));
    for file in [
        "scatter.csv",
        "scatter.svg",
        "mos_histogram.csv",
        "mos_histogram.svg",
        "run_config.json",
    ] {
        assert!(report_out.join(file).exists(), "missing {file}");
    }
    let hist = std::fs::read_to_string(report_out.join("mos_histogram.csv")).unwrap();
    assert!(hist.starts_with("bin_low,bin_high,count\n"));
    assert_eq!(hist.lines().count(), 21);

    // evaluate also accepts the external model's table end to end
    let eval2 = dir.path().join("eval2");
    assert_ok(&uiqa(&[
        "evaluate",
        "--scores",
        external_path.to_str().unwrap(),
        "--mos",
        mos_out.join("mos.csv").to_str().unwrap(),
        "--splits",
        splits_out.join("splits.json").to_str().unwrap(),
        "--out",
        eval2.to_str().unwrap(),
    ]));
    let report2: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(eval2.join("report.json")).unwrap())
            .unwrap();
    let mean = &report2["models"][0]["mean"];
    // the external model is an affine map of MOS: near-perfect everywhere
    assert!(mean["srcc"].as_f64().unwrap() > 0.999);
    assert!(mean["c0"].as_f64().unwrap() > 0.999);
}

#[test]
fn evaluate_subset_flag_requires_manifest() {
    let dir = tempfile::tempdir().unwrap();
    // minimal mos + scores + splits for three images in three groups
    std::fs::write(
        dir.path().join("mos.csv"),
        "image_id,mos,raw_mean,variance,n_raters,iqr\n\
         a,10,1.4,0.2,20,0\nb,50,3,0.2,20,0\nc,90,4.6,0.2,20,0\nd,70,3.8,0.2,20,0\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("scores.csv"),
        "model,image_id,score\nm,a,1\nm,b,5\nm,c,9\nm,d,7\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("splits.json"),
        r#"{"version":1,"folds":[{"train":["a"],"test":["b","c","d"]}],
            "groups":{"a":"g1","b":"g2","c":"g3","d":"g4"}}"#,
    )
    .unwrap();
    let out = uiqa(&[
        "evaluate",
        "--scores",
        dir.path().join("scores.csv").to_str().unwrap(),
        "--mos",
        dir.path().join("mos.csv").to_str().unwrap(),
        "--splits",
        dir.path().join("splits.json").to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
        "--c0-subset",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
