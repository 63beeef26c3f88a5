use std::path::Path;
use std::process::{Command, Output};

use discseg_cli::config::PipelineConfig;
use discseg_cli::io::save_gray;
use discseg_core::GrayImage;

fn discseg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_discseg")).args(args).output().expect("run discseg")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn phantoms(dir: &Path, n: usize, seed: u64) {
    let out = discseg(&["phantom", "-n", &n.to_string(), "--seed", &seed.to_string(), "-o", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", text(&out.stderr));
}

#[test]
fn config_command_prints_parsable_defaults() {
    let out = discseg(&["config"]);
    assert!(out.status.success());
    let printed = text(&out.stdout);
    assert!(printed.contains("locator.initial_fraction = 0.13"));
    assert_eq!(PipelineConfig::parse(&printed).unwrap(), PipelineConfig::default());
}

#[test]
fn unknown_config_key_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "segmenter.closing_radius = 3\nsegmenter.radius_of_doom = 1\n").unwrap();
    let out = discseg(&["--config", cfg.to_str().unwrap(), "config"]);
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("segmenter.radius_of_doom"), "{}", text(&out.stderr));
}

#[test]
fn locate_json_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    phantoms(dir.path(), 2, 11);
    let img = dir.path().join("images/phantom_001.png");
    let a = discseg(&["locate", img.to_str().unwrap(), "--json"]);
    let b = discseg(&["locate", img.to_str().unwrap(), "--json"]);
    assert!(a.status.success(), "{}", text(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["center"]["row"].is_u64());
    assert_eq!(v["low_confidence"], false);
}

#[test]
fn locate_reports_not_located() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("flat.png");
    save_gray(&GrayImage::filled(120, 120, 90).unwrap(), &img).unwrap();
    let cfg = dir.path().join("strict.conf");
    std::fs::write(&cfg, "locator.min_region_area = 100000\n").unwrap();
    let out = discseg(&["-c", cfg.to_str().unwrap(), "locate", img.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("not located"), "{}", text(&out.stderr));
}

#[test]
fn segment_writes_mask_overlay_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    phantoms(dir.path(), 1, 4);
    let out_dir = dir.path().join("seg");
    let out = discseg(&[
        "segment",
        dir.path().join("images/phantom_000.png").to_str().unwrap(),
        "-o",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let mask = image::open(out_dir.join("phantom_000_mask.png")).unwrap().into_luma8();
    assert!(mask.pixels().all(|p| p.0[0] == 0 || p.0[0] == 255));
    assert!(mask.pixels().any(|p| p.0[0] == 255));
    assert!(image::open(out_dir.join("phantom_000_overlay.png")).unwrap().color().has_color());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("phantom_000.json")).unwrap()).unwrap();
    for key in ["center", "rect", "split_col", "temporal_side", "thresholds", "low_confidence", "locator", "elapsed_s"]
    {
        assert!(!v[key].is_null(), "missing {key}");
    }
}

#[test]
fn eval_partial_failure_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    phantoms(dir.path(), 2, 9);
    let manifest = dir.path().join("mixed.csv");
    std::fs::write(
        &manifest,
        "image,gt,fov\nimages/phantom_000.png,gt/phantom_000.png,fov/phantom_000.png\nimages/missing.png,gt/phantom_001.png,\n",
    )
    .unwrap();
    let report = dir.path().join("r/report.csv");
    let out = discseg(&["eval", manifest.to_str().unwrap(), "-o", report.to_str().unwrap(), "--threads", "2"]);
    assert_eq!(out.status.code(), Some(2), "{}", text(&out.stderr));
    assert!(text(&out.stderr).contains("missing"));
    let csv = std::fs::read_to_string(&report).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report.with_extension("json")).unwrap()).unwrap();
    assert_eq!(summary["errors"][0]["image_id"], "missing");
    assert_eq!(summary["images"], 1);
}

#[test]
fn eval_rejects_empty_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("empty.csv");
    std::fs::write(&manifest, "image,gt,fov\n").unwrap();
    let out = discseg(&["eval", manifest.to_str().unwrap(), "-o", dir.path().join("r.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("lists no images"));
}
