//! Vessel segmentation and width estimation inside a region of interest.
//!
//! The region is tiled with small overlapping square windows. In each window
//! the Radon transform gives the orientation of the dominant linear
//! structure; Sobel gradients are projected onto the normal of that structure
//! and read out as 1-D profiles along the window's rows or columns
//! (whichever axis is closer to the normal). A vessel, darker than its
//! surroundings, shows up in a profile as a strong negative extremum followed
//! by a matching positive one. The distance between the two, corrected for
//! the angle between the profile axis and the normal, is the vessel width.
//!
//! Edge validation is a deterministic rule set: a magnitude floor that adapts
//! to the window's median gradient, nearest opposite-sign pairing within a
//! maximum distance, and a symmetry requirement on the two edge strengths.

use serde::Serialize;

use crate::imgproc::{
    angle_set, morph_dilate, morph_reconstruct, radon_direction, sobel, unit_vector, BinaryMask, GradientField,
    GrayImage, PixelCoord, Rect, MIN_RADON_SIDE,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VesselConfig {
    /// Side of the square Radon windows.
    pub window_size: usize,
    /// Step between window origins (50% overlap by default).
    pub stride: usize,
    /// Number of Radon angles over `[0°, 180°)`.
    pub angle_bins: usize,
    /// Peak-to-median Radon ratio below which a window is skipped.
    pub radon_confidence: f64,
    /// Edge threshold as a multiple of the window's median absolute
    /// directional gradient.
    pub edge_threshold_factor: f64,
    /// Absolute floor for the edge threshold, in Sobel units (a sharp step of
    /// height `h` responds with `4h`).
    pub min_edge_response: f64,
    /// Largest accepted distance between paired edges, in profile samples.
    pub max_pair_distance: f64,
    /// Weaker edge over stronger edge must be at least this.
    pub min_pair_symmetry: f64,
    /// Width of the band around validated pixels that reconstruction may grow into.
    pub reconstruct_band: usize,
}

impl Default for VesselConfig {
    fn default() -> Self {
        Self {
            window_size: 15,
            stride: 7,
            angle_bins: 36,
            radon_confidence: 1.5,
            edge_threshold_factor: 2.0,
            min_edge_response: 40.0,
            max_pair_distance: 20.0,
            min_pair_symmetry: 0.4,
            reconstruct_band: 2,
        }
    }
}

impl VesselConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| Err(Error::InvalidParameter { name, reason: reason.to_string() });
        if self.window_size < MIN_RADON_SIDE {
            return bad("vessel_window", "must be at least 15");
        }
        if self.stride == 0 {
            return bad("vessel_stride", "must be positive");
        }
        if self.angle_bins == 0 {
            return bad("angle_bins", "must be positive");
        }
        if !(self.max_pair_distance > 1.0) {
            return bad("max_pair_distance", "must exceed 1");
        }
        Ok(())
    }
}

/// Rules applied to one gradient profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRules {
    pub threshold: f64,
    pub max_distance: f64,
    pub min_symmetry: f64,
}

/// One validated vessel crossing: positions of the falling (bright→dark) and
/// rising (dark→bright) edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgePair {
    pub start: f64,
    pub end: f64,
}

impl EdgePair {
    pub fn distance(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VesselSegment {
    pub window_origin: PixelCoord,
    /// Vessel orientation in degrees, `[0, 180)`.
    pub direction: f64,
    /// Edge positions measured along the vessel normal.
    pub edge_pairs: Vec<EdgePair>,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VesselResult {
    pub roi: Rect,
    /// Image-sized; only pixels inside `roi` can be set.
    pub mask: BinaryMask,
    pub segments: Vec<VesselSegment>,
    pub average_width: f64,
    directions: Vec<Option<f32>>,
}

impl VesselResult {
    fn empty(width: usize, height: usize, roi: Rect) -> Self {
        Self {
            roi,
            mask: BinaryMask::new(width, height),
            segments: Vec::new(),
            average_width: 0.0,
            directions: vec![None; width * height],
        }
    }

    /// Orientation of the segment that labeled this pixel, if any.
    pub fn direction_at(&self, row: usize, col: usize) -> Option<f64> {
        self.directions[row * self.mask.width() + col].map(f64::from)
    }
}

#[derive(Debug, Clone, Copy)]
struct Extremum {
    pos: f64,
    value: f64,
}

fn refine_peak(profile: &[f64], i: usize) -> f64 {
    let (l, c, r) = (profile[i - 1], profile[i], profile[i + 1]);
    let denom = l - 2.0 * c + r;
    if denom.abs() < 1e-12 {
        return i as f64;
    }
    i as f64 + (0.5 * (l - r) / denom).clamp(-0.5, 0.5)
}

fn extrema(profile: &[f64], threshold: f64) -> Vec<Extremum> {
    let mut out = Vec::new();
    for i in 1..profile.len().saturating_sub(1) {
        let (l, v, r) = (profile[i - 1], profile[i], profile[i + 1]);
        let is_min = v <= -threshold && v <= l && v < r;
        let is_max = v >= threshold && v >= l && v > r;
        if is_min || is_max {
            out.push(Extremum { pos: refine_peak(profile, i), value: v });
        }
    }
    out
}

/// Pair each rising extremum with the closest preceding falling one.
///
/// Extrema must reach `rules.threshold` in magnitude. Pairs are ordered and
/// never share an edge.
pub fn validate_edge_pairs(profile: &[f64], rules: &EdgeRules) -> Vec<EdgePair> {
    if profile.len() < 3 {
        return Vec::new();
    }
    let threshold = rules.threshold.max(f64::MIN_POSITIVE);
    let mut pairs = Vec::new();
    let mut pending: Option<Extremum> = None;
    for e in extrema(profile, threshold) {
        if e.value < 0.0 {
            pending = Some(e);
            continue;
        }
        if let Some(fall) = pending.take() {
            let (a, b) = (fall.value.abs(), e.value.abs());
            let symmetric = a.min(b) / a.max(b) >= rules.min_symmetry;
            if e.pos - fall.pos <= rules.max_distance && symmetric {
                pairs.push(EdgePair { start: fall.pos, end: e.pos });
            }
        }
    }
    pairs
}

fn window_origins(start: usize, end: usize, size: usize, stride: usize) -> Vec<usize> {
    let mut origins: Vec<usize> = (start..).step_by(stride).take_while(|&p| p + size <= end).collect();
    if let Some(&last) = origins.last() {
        if last + size < end {
            origins.push(end - size);
        }
    }
    origins
}

fn median_abs(values: &mut [f64]) -> f64 {
    for v in values.iter_mut() {
        *v = v.abs();
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Gradient field of a sub-rectangle, with its offset in the image.
struct LocalGradient {
    field: GradientField,
    area: Rect,
}

impl LocalGradient {
    fn project(&self, row: usize, col: usize, dir: (f64, f64)) -> f64 {
        self.field.project(row - self.area.top, col - self.area.left, dir)
    }

    fn magnitude(&self, row: usize, col: usize) -> f64 {
        self.field.magnitude(row - self.area.top, col - self.area.left)
    }
}

/// Segment vessels inside `roi` and measure their widths.
pub fn segment_vessels(img: &GrayImage, roi: Rect, cfg: &VesselConfig) -> Result<VesselResult> {
    cfg.validate()?;
    let (w, h) = img.dims();
    if !roi.fits_in(w, h) {
        return Err(Error::EmptyRoi(roi));
    }
    if roi.width() < cfg.window_size || roi.height() < cfg.window_size {
        return Err(Error::ImageTooSmall { width: roi.width(), height: roi.height(), min: cfg.window_size });
    }

    let margin = cfg.max_pair_distance.ceil() as usize + 2;
    let area = Rect::new(
        roi.top.saturating_sub(margin),
        roi.left.saturating_sub(margin),
        (roi.bottom + margin).min(h),
        (roi.right + margin).min(w),
    );
    let grad = LocalGradient { field: sobel(&img.crop(area)?)?, area };
    let angles = angle_set(cfg.angle_bins);
    let ws = cfg.window_size;

    let mut result = VesselResult::empty(w, h, roi);
    let mut marker = BinaryMask::new(w, h);
    let mut profile = Vec::new();
    let mut window_grad = Vec::with_capacity(ws * ws);

    for top in window_origins(roi.top, roi.bottom, ws, cfg.stride) {
        for left in window_origins(roi.left, roi.right, ws, cfg.stride) {
            let window = Rect::new(top, left, top + ws, left + ws);
            let est = radon_direction(&img.crop(window)?, &angles)?;
            if est.score < cfg.radon_confidence {
                continue;
            }
            let (cos_t, sin_t) = unit_vector(est.angle);
            // near-horizontal structure: sample down the columns
            let along_rows = cos_t.abs() >= sin_t.abs();
            let axis_deg = if along_rows { 90.0 } else { 0.0 };
            let mut normal_deg = est.angle + 90.0;
            let mut factor = (normal_deg - axis_deg).to_radians().cos();
            if factor < 0.0 {
                normal_deg -= 180.0;
                factor = -factor;
            }
            let dir = unit_vector(normal_deg);

            window_grad.clear();
            for r in window.top..window.bottom {
                for c in window.left..window.right {
                    window_grad.push(grad.project(r, c, dir));
                }
            }
            let rules = EdgeRules {
                threshold: (cfg.edge_threshold_factor * median_abs(&mut window_grad)).max(cfg.min_edge_response),
                max_distance: cfg.max_pair_distance,
                min_symmetry: cfg.min_pair_symmetry,
            };

            let (line_range, span, span_limit) = if along_rows {
                (window.left..window.right, (window.top, window.bottom), (area.top, area.bottom))
            } else {
                (window.top..window.bottom, (window.left, window.right), (area.left, area.right))
            };
            let first = span.0.saturating_sub(margin).max(span_limit.0);
            let last = (span.1 + margin).min(span_limit.1);

            let mut pairs = Vec::new();
            for line in line_range {
                profile.clear();
                profile.extend((first..last).map(|k| {
                    let (r, c) = if along_rows { (k, line) } else { (line, k) };
                    grad.project(r, c, dir)
                }));
                for pair in validate_edge_pairs(&profile, &rules) {
                    let (a, b) = (pair.start + first as f64, pair.end + first as f64);
                    let mid = 0.5 * (a + b);
                    if mid < span.0 as f64 || mid >= span.1 as f64 {
                        continue;
                    }
                    for k in (a.ceil() as usize)..=(b.floor() as usize) {
                        let (r, c) = if along_rows { (k, line) } else { (line, k) };
                        if roi.contains(r, c) {
                            marker.set(r, c, true);
                            let slot = &mut result.directions[r * w + c];
                            if slot.is_none() {
                                *slot = Some(est.angle as f32);
                            }
                        }
                    }
                    pairs.push(EdgePair { start: a * factor, end: b * factor });
                }
            }
            if !pairs.is_empty() {
                let width = pairs.iter().map(EdgePair::distance).sum::<f64>() / pairs.len() as f64;
                result.segments.push(VesselSegment {
                    window_origin: PixelCoord::new(top, left),
                    direction: est.angle,
                    edge_pairs: pairs,
                    width,
                });
            }
        }
    }

    if !result.segments.is_empty() {
        let band = morph_dilate(&marker, cfg.reconstruct_band);
        let loose_threshold = 0.5 * cfg.min_edge_response;
        let loose = BinaryMask::from_fn(w, h, |r, c| {
            marker.get(r, c) || (band.get(r, c) && roi.contains(r, c) && grad.magnitude(r, c) >= loose_threshold)
        });
        result.mask = morph_reconstruct(&marker, &loose)?;
        result.average_width = result.segments.iter().map(|s| s.width).sum::<f64>() / result.segments.len() as f64;
    }
    Ok(result)
}

/// Average vessel width in a square window centered on `center`, shifted to
/// stay inside the image.
pub fn average_vessel_width(
    img: &GrayImage,
    center: PixelCoord,
    window_side: usize,
    cfg: &VesselConfig,
) -> Result<f64> {
    let rect = Rect::centered_square(center, window_side, img.width(), img.height());
    if rect.width() < cfg.window_size || rect.height() < cfg.window_size {
        return Err(Error::ImageTooSmall { width: rect.width(), height: rect.height(), min: cfg.window_size });
    }
    Ok(segment_vessels(img, rect, cfg)?.average_width)
}
