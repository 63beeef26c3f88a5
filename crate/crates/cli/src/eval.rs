//! Batch evaluation against ground-truth masks.

use std::time::Instant;

use anyhow::{Context, Result};
use discseg_core::metrics::{aggregate, confusion, localization_success};
use discseg_core::{analyze, BatchReport, BinaryMask, EvalRecord};
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::io::{load_gray, load_mask_sized};
use crate::manifest::ManifestEntry;
use crate::report::RowError;

#[derive(Debug)]
pub struct EvalRun {
    /// `None` only when every row failed.
    pub report: Option<BatchReport>,
    /// Rows that could not be evaluated at all, in manifest order.
    pub errors: Vec<RowError>,
}

/// Evaluate one image. A disk that cannot be located at all counts as an
/// empty prediction with `located = false`; only I/O and size problems are
/// errors.
pub fn evaluate_one(entry: &ManifestEntry, cfg: &PipelineConfig) -> Result<EvalRecord> {
    let start = Instant::now();
    let img = load_gray(&entry.image, cfg.channel)?;
    let gt = load_mask_sized(&entry.gt, img.dims())?;
    let fov = entry.fov.as_ref().map(|p| load_mask_sized(p, img.dims())).transpose()?;

    let (pred, located) = match analyze(&img, &cfg.disk) {
        Ok(a) => {
            let located = localization_success(a.location.center, &gt);
            (a.segmentation.mask, located)
        }
        Err(discseg_core::Error::NotLocated) => (BinaryMask::new(img.width(), img.height()), false),
        Err(e) => return Err(e).with_context(|| format!("analyzing {}", entry.image.display())),
    };
    let counts = confusion(&pred, &gt, fov.as_ref())?;
    Ok(EvalRecord::new(entry.id.clone(), counts, located, start.elapsed().as_secs_f64()))
}

/// Evaluate every entry on a pool of `cfg.threads` workers (0 = one per
/// core). Records come back sorted by image id, so the report only depends
/// on the inputs, never on scheduling.
pub fn evaluate(entries: &[ManifestEntry], cfg: &PipelineConfig) -> Result<EvalRun> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build().context("building the worker pool")?;
    let results: Vec<_> = pool.install(|| entries.par_iter().map(|e| (e, evaluate_one(e, cfg))).collect());

    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (entry, result) in results {
        match result {
            Ok(r) => records.push(r),
            Err(e) => errors.push(RowError { image_id: entry.id.clone(), message: format!("{e:#}") }),
        }
    }
    let report = if records.is_empty() { None } else { Some(aggregate(records)?) };
    Ok(EvalRun { report, errors })
}
