//! Optic disk segmentation from a located center.
//!
//! 1. Move the center onto the vessel trunk.
//! 2. Scan the center row for the disk rim on both sides, enlarging the scan
//!    if the rim is not found.
//! 3. Build the circumscribing rectangle from the two rim points.
//! 4. Split the rectangle at the major vertical vessel and Otsu-threshold
//!    the two halves separately, since the temporal half is brighter.

use serde::Serialize;

use crate::imgproc::{
    fill_holes, histogram, largest_component, morph_close, otsu_from_histogram, trace_contour, BinaryMask, GrayImage,
    PixelCoord, Rect,
};
use crate::locator::LocatorOutcome;
use crate::vessels::{segment_vessels, VesselConfig, VesselResult};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmenterConfig {
    /// Vertical over horizontal disk diameter assumed for the rectangle.
    pub diameter_ratio_max: f64,
    /// Initial half-width of the rim scan, pixels at the reference width.
    pub scan_halfwidth: f64,
    pub enlargement_factor: f64,
    pub max_enlargements: usize,
    /// Rim gradients must reach this multiple of the median |gx| on the scan line...
    pub grad_min_factor: f64,
    /// ...and this fraction of the strongest non-vessel |gx| on it.
    pub grad_min_peak_fraction: f64,
    /// Plausible horizontal disk diameter, pixels at the reference width.
    pub diameter_min: f64,
    pub diameter_max: f64,
    pub reference_width: f64,
    /// Vessel pixels within this many degrees of vertical vote for the split.
    pub vertical_tolerance_deg: f64,
    /// Central share of the rectangle's columns searched for the split.
    pub split_search_fraction: f64,
    /// Threshold the halves separately; `false` uses one Otsu threshold for
    /// the whole rectangle.
    pub dual_threshold: bool,
    pub closing_radius: usize,
    /// Side of the window around the center used to refine it.
    pub analysis_window: usize,
    /// After the first rim scan, find the top and bottom rim beside the
    /// trunk and rescan through their midpoint, in case the located center
    /// was far from mid-height.
    pub vertical_recenter: bool,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        Self {
            diameter_ratio_max: 1.2,
            scan_halfwidth: 60.0,
            enlargement_factor: 1.25,
            max_enlargements: 3,
            grad_min_factor: 1.5,
            grad_min_peak_fraction: 0.25,
            diameter_min: 70.0,
            diameter_max: 200.0,
            reference_width: 565.0,
            vertical_tolerance_deg: 25.0,
            split_search_fraction: 0.6,
            dual_threshold: true,
            closing_radius: 2,
            analysis_window: 70,
            vertical_recenter: true,
        }
    }
}

impl SegmenterConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.diameter_ratio_max >= 1.0) {
            return bad("diameter_ratio_max", format!("{} is below 1", self.diameter_ratio_max));
        }
        if !(self.enlargement_factor > 1.0) {
            return bad("enlargement_factor", format!("{} must exceed 1", self.enlargement_factor));
        }
        if !(self.scan_halfwidth >= 2.0) {
            return bad("scan_halfwidth", format!("{} is too small", self.scan_halfwidth));
        }
        if !(self.diameter_min > 0.0 && self.diameter_min <= self.diameter_max) {
            return bad("diameter_min", format!("need 0 < {} <= {}", self.diameter_min, self.diameter_max));
        }
        if !(self.reference_width > 0.0) {
            return bad("reference_width", format!("{} must be positive", self.reference_width));
        }
        if !(self.split_search_fraction > 0.0 && self.split_search_fraction <= 1.0) {
            return bad("split_search_fraction", format!("{} is outside (0, 1]", self.split_search_fraction));
        }
        if !(0.0..=90.0).contains(&self.vertical_tolerance_deg) {
            return bad("vertical_tolerance_deg", format!("{} is outside [0, 90]", self.vertical_tolerance_deg));
        }
        Ok(())
    }

    /// Plausible diameter range on an image `width` pixels wide.
    pub fn diameter_range(&self, width: usize) -> (f64, f64) {
        let s = width as f64 / self.reference_width;
        (self.diameter_min * s, self.diameter_max * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalSide {
    LeftOfSplit,
    RightOfSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiskBox {
    pub center: PixelCoord,
    pub rect: Rect,
    pub split_col: usize,
    pub temporal_side: TemporalSide,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationResult {
    pub mask: BinaryMask,
    pub disk_box: DiskBox,
    /// Closed outer contour of `mask`, clockwise from its topmost-leftmost pixel.
    pub boundary: Vec<PixelCoord>,
    pub low_confidence: bool,
    /// Scan enlargements used to find the rim.
    pub enlargements: usize,
    /// Otsu thresholds left and right of the split (equal in single mode).
    pub thresholds: (u8, u8),
}

/// Shift the center's column onto the nearest vertical vessel band in the
/// `window`-sized square around it. Returns the new center and whether any
/// vessel pixels were there to move toward.
pub fn refine_center(vessels: &VesselResult, initial: PixelCoord, window: usize) -> (PixelCoord, bool) {
    let (w, h) = vessels.mask.dims();
    let rect = Rect::centered_square(initial, window, w, h);
    let counts: Vec<usize> =
        (rect.left..rect.right).map(|c| (rect.top..rect.bottom).filter(|&r| vessels.mask.get(r, c)).count()).collect();
    let max = counts.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return (initial, false);
    }
    // runs of heavily populated columns; pick the run nearest the initial column
    let heavy: Vec<bool> = counts.iter().map(|&n| 2 * n >= max).collect();
    let mut best: Option<(usize, usize)> = None; // (distance, center col)
    let mut c = 0;
    while c < heavy.len() {
        if !heavy[c] {
            c += 1;
            continue;
        }
        let start = c;
        while c < heavy.len() && heavy[c] {
            c += 1;
        }
        let (a, b) = (rect.left + start, rect.left + c - 1);
        let distance = if initial.col < a {
            a - initial.col
        } else if initial.col > b {
            initial.col - b
        } else {
            0
        };
        let center = (a + b) / 2;
        if best.is_none_or(|(d, _)| distance < d) {
            best = Some((distance, center));
        }
    }
    let (_, col) = best.expect("max > 0 implies a heavy column");
    (PixelCoord::new(initial.row, col), true)
}

/// Horizontal Sobel responses along row `row` over `[from, to)`.
fn row_gradient(img: &GrayImage, row: usize, from: usize, to: usize) -> Vec<i32> {
    (from..to)
        .map(|c| {
            let (r, c) = (row as isize, c as isize);
            let px = |dr: isize, dc: isize| img.get_clamped(r + dr, c + dc) as i32;
            (px(-1, 1) + 2 * px(0, 1) + px(1, 1)) - (px(-1, -1) + 2 * px(0, -1) + px(1, -1))
        })
        .collect()
}

/// Vertical Sobel responses down column `col` over `[from, to)`.
fn col_gradient(img: &GrayImage, col: usize, from: usize, to: usize) -> Vec<i32> {
    (from..to)
        .map(|r| {
            let (r, c) = (r as isize, col as isize);
            let px = |dr: isize, dc: isize| img.get_clamped(r + dr, c + dc) as i32;
            (px(1, -1) + 2 * px(1, 0) + px(1, 1)) - (px(-1, -1) + 2 * px(-1, 0) + px(-1, 1))
        })
        .collect()
}

/// Innermost strong extremum of `sign * g` walking outward from index
/// `start` in direction `step`, skipping `excluded` indices.
fn innermost_edge(
    g: &[i32],
    start: usize,
    step: isize,
    sign: f64,
    threshold: f64,
    excluded: impl Fn(usize) -> bool,
) -> Option<usize> {
    let mut i = start as isize + step;
    while i >= 1 && (i as usize) + 1 < g.len() {
        let k = i as usize;
        let v = sign * g[k] as f64;
        if v >= threshold && v >= sign * g[k - 1] as f64 && v >= sign * g[k + 1] as f64 && !excluded(k) {
            return Some(k);
        }
        i += step;
    }
    None
}

fn robust_threshold(g: &[i32], excluded: impl Fn(usize) -> bool, cfg: &SegmenterConfig) -> f64 {
    let mut abs: Vec<f64> = g.iter().map(|&v| (v as f64).abs()).collect();
    let peak = (0..g.len()).filter(|&k| !excluded(k)).map(|k| (g[k] as f64).abs()).fold(0.0, f64::max);
    abs.sort_by(f64::total_cmp);
    let median = if abs.is_empty() { 0.0 } else { abs[abs.len() / 2] };
    // never accept a zero threshold: a flat line has no rim
    (cfg.grad_min_factor * median).max(cfg.grad_min_peak_fraction * peak).max(1.0)
}

/// Mid-height of the disk: top and bottom rim found on columns a quarter
/// box-width either side of `center`, searched up to `reach` rows away.
fn vertical_midpoint(
    img: &GrayImage,
    vessels: &VesselResult,
    center: PixelCoord,
    box_width: usize,
    reach: usize,
    cfg: &SegmenterConfig,
) -> Option<usize> {
    let h = img.height();
    let from = center.row.saturating_sub(reach);
    let to = (center.row + reach + 1).min(h);
    let mut mids = Vec::new();
    for col in [center.col.saturating_sub(box_width / 4), center.col + box_width / 4] {
        if col >= img.width() {
            continue;
        }
        let g = col_gradient(img, col, from, to);
        let excluded = |k: usize| vessels.mask.get(from + k, col);
        let threshold = robust_threshold(&g, excluded, cfg);
        let start = center.row - from;
        let top = innermost_edge(&g, start, -1, 1.0, threshold, excluded);
        let bottom = innermost_edge(&g, start, 1, -1.0, threshold, excluded);
        if let (Some(t), Some(b)) = (top, bottom) {
            mids.push(from + (t + b) / 2);
        }
    }
    (!mids.is_empty()).then(|| mids.iter().sum::<usize>() / mids.len())
}

/// Innermost rim candidate on each side of `center` within `skip..=halfwidth` columns.
fn scan_rim(
    img: &GrayImage,
    center: PixelCoord,
    vessels: &VesselResult,
    halfwidth: usize,
    grad_min: f64,
    skip: (usize, usize),
) -> (Option<PixelCoord>, Option<PixelCoord>) {
    let w = img.width();
    let from = center.col.saturating_sub(halfwidth + 1);
    let to = (center.col + halfwidth + 2).min(w);
    let g = row_gradient(img, center.row, from, to);
    let at = |c: usize| g[c - from] as f64;
    let qualifies = |c: usize, sign: f64| {
        c > from
            && c + 1 < to
            && !vessels.mask.get(center.row, c)
            && sign * at(c) >= grad_min
            && sign * at(c) >= sign * at(c - 1)
            && sign * at(c) >= sign * at(c + 1)
    };
    let left = (skip.0.max(1)..=halfwidth)
        .take_while(|&d| d <= center.col)
        .map(|d| center.col - d)
        .find(|&c| qualifies(c, 1.0))
        .map(|c| PixelCoord::new(center.row, c));
    let right = (skip.1.max(1)..=halfwidth)
        .map(|d| center.col + d)
        .take_while(|&c| c < w)
        .find(|&c| qualifies(c, -1.0))
        .map(|c| PixelCoord::new(center.row, c));
    (left, right)
}

/// Rim points left and right of `center`: the innermost points on the center
/// row whose horizontal gradient reaches `grad_min` with the sign of entering
/// (left) or leaving (right) a bright disk, skipping vessel pixels.
pub fn find_boundary_points(
    img: &GrayImage,
    center: PixelCoord,
    vessels: &VesselResult,
    window_halfwidth: usize,
    grad_min: f64,
) -> Option<(PixelCoord, PixelCoord)> {
    match scan_rim(img, center, vessels, window_halfwidth, grad_min, (0, 0)) {
        (Some(l), Some(r)) => Some((l, r)),
        _ => None,
    }
}

/// Rim threshold on the scan line: the larger of a multiple of the median
/// |gx| and a fraction of the strongest non-vessel |gx|.
pub fn rim_gradient_threshold(
    img: &GrayImage,
    center: PixelCoord,
    vessels: &VesselResult,
    halfwidth: usize,
    cfg: &SegmenterConfig,
) -> f64 {
    let from = center.col.saturating_sub(halfwidth);
    let to = (center.col + halfwidth + 1).min(img.width());
    let g = row_gradient(img, center.row, from, to);
    robust_threshold(&g, |k| vessels.mask.get(center.row, from + k), cfg)
}

/// Rectangle spanning the two rim points, `ratio_max` times as tall as wide,
/// clipped to the image. `None` if the width is outside `diameter_range`.
pub fn circumscribe(
    width: usize,
    height: usize,
    left: PixelCoord,
    right: PixelCoord,
    ratio_max: f64,
    diameter_range: (f64, f64),
) -> Option<(Rect, PixelCoord)> {
    if right.col <= left.col {
        return None;
    }
    let box_width = right.col - left.col;
    if (box_width as f64) < diameter_range.0 || (box_width as f64) > diameter_range.1 {
        return None;
    }
    let center = PixelCoord::new(left.row, (left.col + right.col) / 2);
    let box_height = (box_width as f64 * ratio_max).round() as usize;
    let top = center.row.saturating_sub(box_height / 2);
    let rect = Rect::new(top, left.col, top + box_height, right.col).clip(width, height);
    Some((rect, center))
}

/// Split column and whether it is only the fallback (rectangle center).
pub fn split_regions(vessels: &VesselResult, rect: Rect, cfg: &SegmenterConfig) -> (usize, bool) {
    let center_col = rect.left + rect.width() / 2;
    let margin = ((1.0 - cfg.split_search_fraction) / 2.0 * rect.width() as f64).floor() as usize;
    let (lo, hi) = (rect.left + margin, rect.right.saturating_sub(margin).max(rect.left + margin + 1));
    let mut best: Option<(usize, usize)> = None; // (score, col)
    for c in lo..hi.min(rect.right) {
        let score = (rect.top..rect.bottom)
            .filter(|&r| {
                vessels.mask.get(r, c)
                    && vessels.direction_at(r, c).is_some_and(|d| (d - 90.0).abs() <= cfg.vertical_tolerance_deg)
            })
            .count();
        if score == 0 {
            continue;
        }
        let replace = match best {
            None => true,
            Some((s, bc)) => score > s || (score == s && c.abs_diff(center_col) < bc.abs_diff(center_col)),
        };
        if replace {
            best = Some((score, c));
        }
    }
    match best {
        Some((_, c)) => (c, false),
        None => (center_col, true),
    }
}

fn mean_excluding(img: &GrayImage, rect: Rect, exclude: &BinaryMask) -> Option<f64> {
    let (mut sum, mut n) = (0u64, 0u64);
    for r in rect.top..rect.bottom {
        for c in rect.left..rect.right {
            if !exclude.get(r, c) {
                sum += img.get(r, c) as u64;
                n += 1;
            }
        }
    }
    (n > 0).then(|| sum as f64 / n as f64)
}

/// The brighter side of the split is taken as temporal.
pub fn temporal_side(img: &GrayImage, vessels: &VesselResult, rect: Rect, split_col: usize) -> TemporalSide {
    let left = Rect { right: split_col, ..rect };
    let right = Rect { left: split_col, ..rect };
    let l = mean_excluding(img, left, &vessels.mask).unwrap_or(0.0);
    let r = mean_excluding(img, right, &vessels.mask).unwrap_or(0.0);
    if l >= r {
        TemporalSide::LeftOfSplit
    } else {
        TemporalSide::RightOfSplit
    }
}

fn otsu_part(img: &GrayImage, part: Rect, vessels: &BinaryMask) -> u8 {
    if part.is_empty() {
        return 255;
    }
    let inverse = BinaryMask::from_fn(img.width(), img.height(), |r, c| !vessels.get(r, c));
    let hist = histogram(img, Some(part), Some(&inverse));
    otsu_from_histogram(&hist).or_else(|| otsu_from_histogram(&histogram(img, Some(part), None))).unwrap_or(255)
}

/// Fill vessel runs that are flanked by foreground on both ends, row-wise
/// and column-wise, so vessels crossing the disk do not cut it apart.
fn bridge_vessels(mask: &BinaryMask, vessels: &BinaryMask, rect: Rect) -> BinaryMask {
    let mut out = mask.clone();
    let gap = |fixed: usize, range: std::ops::Range<usize>, by_row: bool, out: &mut BinaryMask| {
        let at = |k: usize| if by_row { (fixed, k) } else { (k, fixed) };
        let mut k = range.start;
        while k < range.end {
            let (r, c) = at(k);
            if mask.get(r, c) || !vessels.get(r, c) {
                k += 1;
                continue;
            }
            let start = k;
            while k < range.end && {
                let (r, c) = at(k);
                !mask.get(r, c) && vessels.get(r, c)
            } {
                k += 1;
            }
            let before = start > range.start && {
                let (r, c) = at(start - 1);
                mask.get(r, c)
            };
            let after = k < range.end && {
                let (r, c) = at(k);
                mask.get(r, c)
            };
            if before && after {
                for j in start..k {
                    let (r, c) = at(j);
                    out.set(r, c, true);
                }
            }
        }
    };
    for r in rect.top..rect.bottom {
        gap(r, rect.left..rect.right, true, &mut out);
    }
    for c in rect.left..rect.right {
        gap(c, rect.top..rect.bottom, false, &mut out);
    }
    out
}

/// Threshold `rect` (per side of `split_col` when given), then clean up into
/// a single hole-free component inside `rect`.
pub fn threshold_disk(
    img: &GrayImage,
    vessels: &VesselResult,
    rect: Rect,
    split_col: Option<usize>,
    closing_radius: usize,
) -> (BinaryMask, (u8, u8)) {
    let (w, h) = img.dims();
    let thresholds = match split_col {
        Some(s) => (
            otsu_part(img, Rect { right: s, ..rect }, &vessels.mask),
            otsu_part(img, Rect { left: s, ..rect }, &vessels.mask),
        ),
        None => {
            let t = otsu_part(img, rect, &vessels.mask);
            (t, t)
        }
    };
    let split = split_col.unwrap_or(rect.right);
    let raw = BinaryMask::from_fn(w, h, |r, c| {
        rect.contains(r, c) && img.get(r, c) >= if c < split { thresholds.0 } else { thresholds.1 }
    });
    let bridged = bridge_vessels(&raw, &vessels.mask, rect);
    let closed = morph_close(&bridged, closing_radius).restricted_to(rect);
    let mask = fill_holes(&largest_component(&closed));
    (mask, thresholds)
}

/// Rim scan with enlargement: returns the circumscribing rectangle, its
/// center and the number of enlargements used.
fn search_rim(
    img: &GrayImage,
    vessels: &VesselResult,
    center: PixelCoord,
    cfg: &SegmenterConfig,
    base_halfwidth: f64,
    range: (f64, f64),
) -> Option<(Rect, PixelCoord, usize)> {
    let (w, h) = img.dims();
    let mut skip = (0, 0);
    for k in 0..=cfg.max_enlargements {
        let halfwidth = (base_halfwidth * cfg.enlargement_factor.powi(k as i32)).round() as usize;
        let grad_min = rim_gradient_threshold(img, center, vessels, halfwidth, cfg);
        let (Some(l), Some(r)) = scan_rim(img, center, vessels, halfwidth, grad_min, skip) else {
            continue;
        };
        if let Some((rect, mid)) = circumscribe(w, h, l, r, cfg.diameter_ratio_max, range) {
            return Some((rect, mid, k));
        }
        if ((r.col - l.col) as f64) < range.0 {
            // too narrow: an inner structure, look beyond it next time
            skip = (center.col - l.col + 1, r.col - center.col + 1);
        }
    }
    None
}

/// Segment the disk around a located center.
pub fn segment_disk(
    img: &GrayImage,
    located: &LocatorOutcome,
    cfg: &SegmenterConfig,
    vessel_cfg: &VesselConfig,
) -> Result<SegmentationResult> {
    cfg.validate()?;
    let (w, h) = img.dims();
    let scale = w as f64 / cfg.reference_width;
    let range = cfg.diameter_range(w);
    let base_halfwidth = cfg.scan_halfwidth * scale;
    let max_halfwidth = base_halfwidth * cfg.enlargement_factor.powi(cfg.max_enlargements as i32);

    // one vessel pass covering every scan and the tallest plausible rectangle
    let reach = max_halfwidth.max(cfg.diameter_ratio_max * range.1 / 2.0).ceil() as usize + 4;
    let vessel_roi = Rect::around(located.center, reach, reach, w, h);
    let vessels = if vessel_roi.width() >= vessel_cfg.window_size && vessel_roi.height() >= vessel_cfg.window_size {
        segment_vessels(img, vessel_roi, vessel_cfg)?
    } else {
        return Err(Error::ImageTooSmall { width: w, height: h, min: vessel_cfg.window_size });
    };

    let (center, had_vessels) = refine_center(&vessels, located.center, cfg.analysis_window);
    let mut low_confidence = located.low_confidence || !had_vessels;

    let mut found = search_rim(img, &vessels, center, cfg, base_halfwidth, range);
    if cfg.vertical_recenter {
        if let Some((rect, mid, _)) = found {
            let reach = (range.1 * cfg.diameter_ratio_max).ceil() as usize;
            if let Some(row) = vertical_midpoint(img, &vessels, mid, rect.width(), reach, cfg) {
                if row.abs_diff(mid.row) > 1 {
                    let moved = PixelCoord::new(row, center.col);
                    if let Some(again) = search_rim(img, &vessels, moved, cfg, base_halfwidth, range) {
                        found = Some(again);
                    }
                }
            }
        }
    }
    let enlargements = found.map_or(cfg.max_enlargements, |f| f.2);

    let (rect, center) = match found {
        Some((rect, center, _)) => (rect, center),
        None => {
            low_confidence = true;
            let diameter = (located.candidate.bbox.width() as f64).clamp(range.0, range.1);
            let half_cols = (diameter / 2.0).round() as usize;
            let half_rows = (diameter * cfg.diameter_ratio_max / 2.0).round() as usize;
            (Rect::around(center, half_rows, half_cols, w, h), center)
        }
    };
    if rect.width() < 2 || rect.height() < 2 {
        return Err(Error::EmptyRoi(rect));
    }

    let (split_col, split_fallback) = split_regions(&vessels, rect, cfg);
    low_confidence |= split_fallback;
    let side = temporal_side(img, &vessels, rect, split_col);
    let (mask, thresholds) =
        threshold_disk(img, &vessels, rect, cfg.dual_threshold.then_some(split_col), cfg.closing_radius);
    let boundary = mask.iter_true().next().map(|start| trace_contour(&mask, start)).unwrap_or_default();

    Ok(SegmentationResult {
        mask,
        disk_box: DiskBox { center, rect, split_col, temporal_side: side },
        boundary,
        low_confidence,
        enlargements,
        thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty_vessels(w: usize, h: usize) -> VesselResult {
        segment_vessels(&GrayImage::filled(w, h, 100).unwrap(), Rect::full(w, h), &VesselConfig::default()).unwrap()
    }

    fn disk_image(radius: f64) -> GrayImage {
        GrayImage::from_fn(200, 200, |r, c| if (r as f64 - 100.0).hypot(c as f64 - 100.0) <= radius { 190 } else { 70 })
            .unwrap()
    }

    #[test]
    fn circumscribe_arithmetic() {
        let (rect, center) =
            circumscribe(565, 584, PixelCoord::new(250, 100), PixelCoord::new(250, 180), 1.2, (70.0, 200.0)).unwrap();
        assert_eq!(center, PixelCoord::new(250, 140));
        assert_eq!((rect.width(), rect.height()), (80, 96));
        assert!(rect.contains(center.row, center.col));
        assert!(
            circumscribe(565, 584, PixelCoord::new(250, 100), PixelCoord::new(250, 130), 1.2, (70.0, 200.0)).is_none()
        );
    }

    #[test]
    fn boundary_points_of_synthetic_disk() {
        let img = disk_image(40.0);
        let vessels = empty_vessels(200, 200);
        let center = PixelCoord::new(100, 100);
        let cfg = SegmenterConfig::default();
        let g = rim_gradient_threshold(&img, center, &vessels, 60, &cfg);
        let (l, r) = find_boundary_points(&img, center, &vessels, 60, g).unwrap();
        assert!((l.col as f64 - 60.0).abs() <= 2.0, "{l:?}");
        assert!((r.col as f64 - 140.0).abs() <= 2.0, "{r:?}");
    }

    #[test]
    fn boundary_points_skip_vessels() {
        let mut img = disk_image(40.0);
        for r in 0..200 {
            for c in 113..118 {
                img.set(r, c, 110);
            }
        }
        let mut vessels = empty_vessels(200, 200);
        for r in 0..200 {
            for c in 112..119 {
                vessels.mask.set(r, c, true);
            }
        }
        let center = PixelCoord::new(100, 100);
        let (_, r) = find_boundary_points(&img, center, &vessels, 60, 100.0).unwrap();
        assert!((r.col as f64 - 140.0).abs() <= 2.0, "{r:?}");
    }

    #[test]
    fn constant_image_has_no_rim() {
        let img = GrayImage::filled(200, 200, 90).unwrap();
        let vessels = empty_vessels(200, 200);
        let center = PixelCoord::new(100, 100);
        let g = rim_gradient_threshold(&img, center, &vessels, 60, &SegmenterConfig::default());
        assert!(find_boundary_points(&img, center, &vessels, 60, g).is_none());
    }

    #[test]
    fn refine_moves_to_trunk() {
        let mut vessels = empty_vessels(200, 200);
        for r in 0..200 {
            for c in 78..83 {
                vessels.mask.set(r, c, true);
            }
        }
        let (p, ok) = refine_center(&vessels, PixelCoord::new(90, 100), 70);
        assert!(ok);
        assert_eq!(p.row, 90);
        assert!(p.col.abs_diff(80) <= 1);
        let (q, _) = refine_center(&vessels, PixelCoord::new(90, 80), 70);
        assert_eq!(q.col, 80);
        let (same, ok) = refine_center(&empty_vessels(200, 200), PixelCoord::new(90, 100), 70);
        assert!(!ok);
        assert_eq!(same, PixelCoord::new(90, 100));
    }

    #[test]
    fn split_fallback_on_vessel_free_rect() {
        let vessels = empty_vessels(200, 200);
        let rect = Rect::new(50, 60, 150, 140);
        assert_eq!(split_regions(&vessels, rect, &SegmenterConfig::default()), (100, true));
    }

    #[test]
    fn threshold_disk_is_single_holefree_component() {
        let mut img = disk_image(40.0);
        // dark vessel crossing the disk vertically
        for r in 0..200 {
            for c in 98..103 {
                img.set(r, c, 60);
            }
        }
        let mut vessels = empty_vessels(200, 200);
        for r in 0..200 {
            for c in 97..104 {
                vessels.mask.set(r, c, true);
            }
        }
        let rect = Rect::new(52, 60, 148, 140);
        let (mask, _) = threshold_disk(&img, &vessels, rect, Some(100), 2);
        let comps = crate::imgproc::connected_components(&mask);
        assert_eq!(comps.len(), 1);
        assert_eq!(fill_holes(&mask), mask);
        assert!(mask.iter_true().all(|p| rect.contains(p.row, p.col)));
        assert!(mask.get(100, 100), "vessel inside the disk is bridged");
        assert!(mask.get(100, 70) && mask.get(100, 130));
    }
}
