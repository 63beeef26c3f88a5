//! Optic disk localization.
//!
//! Bright candidate blobs are taken from the top intensity fraction of the
//! field of view, compact blobs survive a circularity filter, and the blob
//! whose 70×70 neighbourhood carries the widest vessels wins, since the major
//! vessels enter the retina through the disk. If no blob has vessels of the
//! required width, the fraction is raised and the search repeated.

use serde::Serialize;

use crate::imgproc::{
    binarize, connected_components, morph_open, percentile_threshold_masked, BinaryMask, GrayImage, PixelCoord, Region,
};
use crate::vessels::{average_vessel_width, VesselConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocatorConfig {
    pub initial_fraction: f64,
    pub fraction_step: f64,
    pub max_fraction: f64,
    pub circularity_min: f64,
    pub min_region_area: usize,
    pub vessel_width_min: f64,
    pub analysis_window: usize,
    /// Pixels brighter than the image minimum by more than this belong to the
    /// field of view.
    pub fov_margin: u8,
    /// Opening radius applied to the bright mask before labeling; strips the
    /// one-pixel spurs that noise leaves along region edges. 0 disables it.
    pub candidate_opening: usize,
}

impl Default for LocatorConfig {
    fn default() -> Self {
        Self {
            initial_fraction: 0.13,
            fraction_step: 0.02,
            max_fraction: 0.30,
            circularity_min: 0.5,
            min_region_area: 30,
            vessel_width_min: 2.0,
            analysis_window: 70,
            fov_margin: 15,
            candidate_opening: 1,
        }
    }
}

impl LocatorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.initial_fraction > 0.0 && self.initial_fraction <= self.max_fraction && self.max_fraction <= 1.0) {
            return bad(
                "initial_fraction",
                format!("need 0 < initial ({}) <= max ({}) <= 1", self.initial_fraction, self.max_fraction),
            );
        }
        if !(self.fraction_step > 0.0) {
            return bad("fraction_step", format!("{} must be positive", self.fraction_step));
        }
        if !(0.0..=1.0).contains(&self.circularity_min) {
            return bad("circularity_min", format!("{} is outside [0, 1]", self.circularity_min));
        }
        if !(self.vessel_width_min >= 0.0) {
            return bad("vessel_width_min", format!("{} must be non-negative", self.vessel_width_min));
        }
        if self.analysis_window == 0 {
            return bad("analysis_window", "must be positive".into());
        }
        Ok(())
    }

    /// The fractions tried, in order.
    pub fn fractions(&self) -> Vec<f64> {
        let steps = ((self.max_fraction - self.initial_fraction) / self.fraction_step + 1e-9).floor() as usize;
        (0..=steps).map(|k| self.initial_fraction + k as f64 * self.fraction_step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocatorOutcome {
    pub center: PixelCoord,
    pub candidate: Region,
    pub average_width: f64,
    /// Number of fractions tried, counting the successful one.
    pub iterations: usize,
    pub fraction_used: f64,
    /// Set when no candidate reached `vessel_width_min`; the outcome is then
    /// the widest-vesselled candidate seen at any fraction.
    pub low_confidence: bool,
}

/// Field-of-view estimate: everything clearly brighter than the black
/// surround. Falls back to the whole image when that leaves almost nothing,
/// which happens for images without a surround.
pub fn estimate_fov(img: &GrayImage, margin: u8) -> BinaryMask {
    let (min, _) = img.min_max();
    let cut = min as u16 + margin as u16 + 1;
    let fov = binarize(img, cut);
    if (fov.count() as f64) < 0.05 * (img.width() * img.height()) as f64 {
        BinaryMask::filled(img.width(), img.height(), true)
    } else {
        fov
    }
}

fn candidates_in_fov(img: &GrayImage, fraction: f64, cfg: &LocatorConfig, fov: &BinaryMask) -> Result<Vec<Region>> {
    let t = percentile_threshold_masked(img, fraction, Some(fov))?;
    let bright = morph_open(&binarize(img, t as u16).and(fov)?, cfg.candidate_opening);
    Ok(connected_components(&bright)
        .into_iter()
        .filter(|r| r.area >= cfg.min_region_area && r.circularity >= cfg.circularity_min)
        .collect())
}

/// Compact bright regions at the given top-intensity fraction, largest first.
pub fn candidate_regions(img: &GrayImage, fraction: f64, cfg: &LocatorConfig) -> Result<Vec<Region>> {
    candidates_in_fov(img, fraction, cfg, &estimate_fov(img, cfg.fov_margin))
}

struct Scored {
    region: Region,
    width: f64,
    iteration: usize,
    fraction: f64,
}

/// Higher width wins, then larger area, then the topmost-leftmost centroid.
fn better(a: &Scored, b: &Scored) -> bool {
    if a.width != b.width {
        return a.width > b.width;
    }
    if a.region.area != b.region.area {
        return a.region.area > b.region.area;
    }
    a.region.centroid_pixel() < b.region.centroid_pixel()
}

pub fn locate_disk(img: &GrayImage, cfg: &LocatorConfig, vessel_cfg: &VesselConfig) -> Result<LocatorOutcome> {
    cfg.validate()?;
    vessel_cfg.validate()?;
    if img.width() < cfg.analysis_window || img.height() < cfg.analysis_window {
        return Err(Error::ImageTooSmall { width: img.width(), height: img.height(), min: cfg.analysis_window });
    }
    let fov = estimate_fov(img, cfg.fov_margin);
    let mut best: Option<Scored> = None;

    for (k, fraction) in cfg.fractions().into_iter().enumerate() {
        let mut round_best: Option<Scored> = None;
        for region in candidates_in_fov(img, fraction, cfg, &fov)? {
            let width = average_vessel_width(img, region.centroid_pixel(), cfg.analysis_window, vessel_cfg)?;
            let scored = Scored { region, width, iteration: k + 1, fraction };
            if round_best.as_ref().is_none_or(|b| better(&scored, b)) {
                round_best = Some(scored);
            }
        }
        let Some(round_best) = round_best else { continue };
        if round_best.width >= cfg.vessel_width_min {
            return Ok(outcome(round_best, false));
        }
        if best.as_ref().is_none_or(|b| better(&round_best, b)) {
            best = Some(round_best);
        }
    }
    best.map(|b| outcome(b, true)).ok_or(Error::NotLocated)
}

fn outcome(s: Scored, low_confidence: bool) -> LocatorOutcome {
    LocatorOutcome {
        center: s.region.centroid_pixel(),
        average_width: s.width,
        iterations: s.iteration,
        fraction_used: s.fraction,
        candidate: s.region,
        low_confidence,
    }
}
