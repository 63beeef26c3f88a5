//! Single-image commands: `locate` and `segment`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use discseg_core::segmenter::segment_disk;
use discseg_core::{locate_disk, LocatorOutcome, PixelCoord, Rect, TemporalSide};
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::io::{load_gray, overlay, save_mask, save_rgb};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocateOutput {
    pub image: String,
    pub center: PixelCoord,
    /// Bounding box of the winning candidate region.
    pub candidate_rect: Rect,
    pub candidate_area: usize,
    pub candidate_circularity: f64,
    pub average_vessel_width: f64,
    pub iterations: usize,
    pub fraction_used: f64,
    pub low_confidence: bool,
}

impl LocateOutput {
    fn new(image: &Path, o: &LocatorOutcome) -> Self {
        LocateOutput {
            image: image.display().to_string(),
            center: o.center,
            candidate_rect: o.candidate.bbox,
            candidate_area: o.candidate.area,
            candidate_circularity: o.candidate.circularity,
            average_vessel_width: o.average_width,
            iterations: o.iterations,
            fraction_used: o.fraction_used,
            low_confidence: o.low_confidence,
        }
    }

    /// One line for terminals; every field is deterministic.
    pub fn line(&self) -> String {
        format!(
            "{}: center row={} col={} width={:.3} iterations={} fraction={:.2}{}",
            self.image,
            self.center.row,
            self.center.col,
            self.average_vessel_width,
            self.iterations,
            self.fraction_used,
            if self.low_confidence { " (low confidence)" } else { "" }
        )
    }
}

pub fn locate(image: &Path, cfg: &PipelineConfig) -> Result<LocateOutput> {
    let img = load_gray(image, cfg.channel)?;
    let outcome = locate_disk(&img, &cfg.disk.locator, &cfg.disk.vessels)
        .with_context(|| format!("locating the disk in {}", image.display()))?;
    Ok(LocateOutput::new(image, &outcome))
}

/// Everything `segment` knows about one image, written next to the mask.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentOutput {
    pub locator: LocateOutput,
    pub center: PixelCoord,
    pub rect: Rect,
    pub split_col: usize,
    pub temporal_side: TemporalSide,
    pub thresholds: (u8, u8),
    pub enlargements: usize,
    pub low_confidence: bool,
    pub area: usize,
    pub elapsed_s: f64,
    pub mask_path: PathBuf,
    pub overlay_path: PathBuf,
}

/// Locate and segment `image`, writing `<stem>_mask.png`,
/// `<stem>_overlay.png` and `<stem>.json` into `out_dir`.
pub fn segment(image: &Path, out_dir: &Path, cfg: &PipelineConfig) -> Result<SegmentOutput> {
    let start = Instant::now();
    let img = load_gray(image, cfg.channel)?;
    let location = locate_disk(&img, &cfg.disk.locator, &cfg.disk.vessels)
        .with_context(|| format!("locating the disk in {}", image.display()))?;
    let seg = segment_disk(&img, &location, &cfg.disk.segmenter, &cfg.disk.vessels)
        .with_context(|| format!("segmenting the disk in {}", image.display()))?;
    let elapsed_s = start.elapsed().as_secs_f64();

    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let stem = image.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "image".into());
    let mask_path = out_dir.join(format!("{stem}_mask.png"));
    let overlay_path = out_dir.join(format!("{stem}_overlay.png"));
    save_mask(&seg.mask, &mask_path)?;
    let b = seg.disk_box;
    save_rgb(img.width(), img.height(), overlay(&img, &seg.boundary, b.rect, b.split_col, b.center), &overlay_path)?;

    let out = SegmentOutput {
        locator: LocateOutput::new(image, &location),
        center: b.center,
        rect: b.rect,
        split_col: b.split_col,
        temporal_side: b.temporal_side,
        thresholds: seg.thresholds,
        enlargements: seg.enlargements,
        low_confidence: seg.low_confidence || location.low_confidence,
        area: seg.mask.count(),
        elapsed_s,
        mask_path,
        overlay_path,
    };
    let json_path = out_dir.join(format!("{stem}.json"));
    fs::write(&json_path, serde_json::to_string_pretty(&out)? + "\n")
        .with_context(|| format!("writing {}", json_path.display()))?;
    Ok(out)
}
