//! Synthetic fundus images with known optic disks.
//!
//! A phantom is a circular field of view on a black surround with a smoothly
//! lit background, an elliptical disk whose temporal half (the half facing
//! the image center) is brighter than its nasal half, and a vessel tree whose
//! vertical trunk runs through the disk and splits into four arcades above
//! and below it. Optional extras:
//!
//! * a small bright circular distractor with no vessels, and
//! * a "dim disk" variant where a large vessel-free bright patch covering
//!   about 14% of the field of view outshines the disk, so the top-13%
//!   candidate pass finds nothing useful.
//!
//! Sizes are specified at a reference canvas width of 565 pixels and scaled
//! with the canvas. Output is a pure function of the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::imgproc::{BinaryMask, GrayImage};
use crate::{Error, Result};

pub const REFERENCE_WIDTH: f64 = 565.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomConfig {
    pub width: usize,
    pub height: usize,
    /// Horizontal and vertical disk diameters stay inside this range, in
    /// pixels at the reference width.
    pub disk_diameter_range: (f64, f64),
    /// Vertical over horizontal disk diameter.
    pub disk_aspect_range: (f64, f64),
    pub noise_sigma: f64,
    /// Fraction of the field of view covered by the bright patch of a dim-disk phantom.
    pub dim_patch_fraction: f64,
}

impl Default for PhantomConfig {
    fn default() -> Self {
        Self {
            width: 565,
            height: 584,
            disk_diameter_range: (70.0, 200.0),
            disk_aspect_range: (1.0, 1.2),
            noise_sigma: 2.0,
            dim_patch_fraction: 0.14,
        }
    }
}

impl PhantomConfig {
    pub fn scale(&self) -> f64 {
        self.width as f64 / REFERENCE_WIDTH
    }

    /// Diameter range in pixels on this canvas.
    pub fn scaled_diameter_range(&self) -> (f64, f64) {
        (self.disk_diameter_range.0 * self.scale(), self.disk_diameter_range.1 * self.scale())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PhantomOptions {
    pub distractor: bool,
    pub dim_disk: bool,
}

/// Ground-truth description of how a phantom was built.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomInfo {
    pub seed: u64,
    pub options: PhantomOptions,
    /// `(row, col)` of the disk ellipse center.
    pub disk_center: (f64, f64),
    pub horizontal_diameter: f64,
    pub vertical_diameter: f64,
    pub trunk_col: f64,
    pub trunk_width: f64,
    /// `true` when the temporal (brighter) half lies left of the trunk.
    pub temporal_left: bool,
    pub temporal_level: f64,
    pub nasal_level: f64,
    /// `(row, col, radius)` of the bright vessel-free blob, if any.
    pub distractor: Option<(f64, f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Phantom {
    pub image: GrayImage,
    pub disk: BinaryMask,
    pub fov: BinaryMask,
    pub info: PhantomInfo,
}

/// Polyline vessel with linearly tapering width.
struct Vessel {
    points: Vec<(f64, f64)>,
    width: (f64, f64),
    contrast: f64,
}

fn bezier(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64), n: usize) -> Vec<(f64, f64)> {
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let u = 1.0 - t;
            (u * u * p0.0 + 2.0 * u * t * p1.0 + t * t * p2.0, u * u * p0.1 + 2.0 * u * t * p1.1 + t * t * p2.1)
        })
        .collect()
}

fn smooth_inside(signed_distance: f64, edge: f64) -> f64 {
    (0.5 - signed_distance / edge).clamp(0.0, 1.0)
}

struct Canvas {
    width: usize,
    height: usize,
    value: Vec<f64>,
}

impl Canvas {
    fn idx(&self, r: usize, c: usize) -> usize {
        r * self.width + c
    }

    /// Darken along vessels; overlapping vessels take the strongest darkening.
    /// Returns the darkening applied per pixel.
    fn draw_vessels(&mut self, vessels: &[Vessel], fov: &BinaryMask) -> Vec<f64> {
        let mut dark = vec![0.0f64; self.width * self.height];
        for v in vessels {
            let total: f64 = v.points.windows(2).map(|s| (s[1].0 - s[0].0).hypot(s[1].1 - s[0].1)).sum();
            let mut walked = 0.0;
            for seg in v.points.windows(2) {
                let (a, b) = (seg[0], seg[1]);
                let len = (b.0 - a.0).hypot(b.1 - a.1);
                let w_at = |s: f64| {
                    let t = if total > 0.0 { (walked + s * len) / total } else { 0.0 };
                    v.width.0 + (v.width.1 - v.width.0) * t
                };
                let reach = v.width.0.max(v.width.1) / 2.0 + 2.0;
                let r0 = (a.0.min(b.0) - reach).floor().max(0.0) as usize;
                let r1 = ((a.0.max(b.0) + reach).ceil().max(0.0) as usize).min(self.height - 1);
                let c0 = (a.1.min(b.1) - reach).floor().max(0.0) as usize;
                let c1 = ((a.1.max(b.1) + reach).ceil().max(0.0) as usize).min(self.width - 1);
                for r in r0..=r1 {
                    for c in c0..=c1 {
                        let (pr, pc) = (r as f64, c as f64);
                        let s = if len > 0.0 {
                            (((pr - a.0) * (b.0 - a.0) + (pc - a.1) * (b.1 - a.1)) / (len * len)).clamp(0.0, 1.0)
                        } else {
                            0.0
                        };
                        let (qr, qc) = (a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1));
                        let d = (pr - qr).hypot(pc - qc);
                        let cover = (w_at(s) / 2.0 + 0.5 - d).clamp(0.0, 1.0);
                        let i = self.idx(r, c);
                        dark[i] = dark[i].max(cover * v.contrast);
                    }
                }
                walked += len;
            }
        }
        for (i, d) in dark.iter_mut().enumerate() {
            if fov.data()[i] {
                self.value[i] -= *d;
            } else {
                *d = 0.0;
            }
        }
        dark
    }

    /// Paint a flat bright disc with a soft edge over whatever is there.
    fn paint_blob(&mut self, center: (f64, f64), radius: f64, level: f64) {
        let reach = radius + 3.0;
        let r0 = (center.0 - reach).max(0.0) as usize;
        let r1 = ((center.0 + reach) as usize).min(self.height - 1);
        let c0 = (center.1 - reach).max(0.0) as usize;
        let c1 = ((center.1 + reach) as usize).min(self.width - 1);
        for r in r0..=r1 {
            for c in c0..=c1 {
                let d = (r as f64 - center.0).hypot(c as f64 - center.1) - radius;
                let s = smooth_inside(d, 3.0);
                let i = self.idx(r, c);
                self.value[i] = self.value[i] * (1.0 - s) + level * s;
            }
        }
    }
}

/// Render one phantom.
pub fn generate(cfg: &PhantomConfig, options: PhantomOptions, seed: u64) -> Result<Phantom> {
    if cfg.width < 64 || cfg.height < 64 {
        return Err(Error::ImageTooSmall { width: cfg.width, height: cfg.height, min: 64 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (cfg.width, cfg.height);
    let scale = cfg.scale();
    let center = ((h as f64 - 1.0) / 2.0, (w as f64 - 1.0) / 2.0);
    let fov_radius = 0.47 * w.min(h) as f64;
    let fov = BinaryMask::from_fn(w, h, |r, c| (r as f64 - center.0).hypot(c as f64 - center.1) <= fov_radius);

    // disk geometry
    let aspect = rng.random_range(cfg.disk_aspect_range.0..=cfg.disk_aspect_range.1);
    let (dmin, dmax) = cfg.scaled_diameter_range();
    let dh = rng.random_range(dmin..=(dmax / aspect).max(dmin));
    let dv = dh * aspect;
    let side: f64 = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let max_offset = fov_radius - dh / 2.0 - 25.0 * scale;
    let offset = rng.random_range(0.30 * fov_radius..=0.42 * fov_radius).min(max_offset).max(0.0);
    let disk_center = (center.0 + rng.random_range(-0.12..=0.12) * fov_radius, center.1 + side * offset);
    let temporal_left = side > 0.0;
    let trunk_col = disk_center.1 + rng.random_range(-0.06..=0.06) * dh;
    let temporal_level = rng.random_range(185.0..=205.0);
    let nasal_level = temporal_level - rng.random_range(30.0..=55.0);

    // background: vignetting, a bright illumination patch on the far side of
    // the image, faint ripples
    let base = rng.random_range(72.0..=86.0);
    let bump_amp = if options.dim_disk { 0.0 } else { rng.random_range(28.0..=38.0) };
    let bump_center = (
        center.0 + rng.random_range(-0.2..=0.2) * fov_radius,
        center.1 - side * rng.random_range(0.35..=0.5) * fov_radius,
    );
    let bump_size = 0.33 * fov_radius;
    let ripples: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
            let period = rng.random_range(60.0..=140.0) * scale;
            (theta.cos() / period, theta.sin() / period, rng.random_range(0.0..6.3), rng.random_range(0.5..=1.5))
        })
        .collect();

    let mut canvas = Canvas { width: w, height: h, value: vec![0.0; w * h] };
    let (a, b) = (dh / 2.0, dv / 2.0);
    let mut disk = BinaryMask::new(w, h);
    for r in 0..h {
        for c in 0..w {
            if !fov.get(r, c) {
                continue;
            }
            let (pr, pc) = (r as f64, c as f64);
            let rho = (pr - center.0).hypot(pc - center.1) / fov_radius;
            let bump = bump_amp / (1.0 + ((pr - bump_center.0).hypot(pc - bump_center.1) / bump_size).powi(4));
            let ripple: f64 = ripples
                .iter()
                .map(|&(fr, fc, phase, amp)| amp * (std::f64::consts::TAU * (pr * fr + pc * fc) + phase).sin())
                .sum();
            let mut v = base - 16.0 * rho * rho + bump + ripple;

            let (dy, dx) = (pr - disk_center.0, pc - disk_center.1);
            let q = ((dx / a).powi(2) + (dy / b).powi(2)).sqrt();
            if q <= 1.0 {
                disk.set(r, c, true);
            }
            if q < 1.3 {
                let radial = (dx * dx + dy * dy).sqrt();
                let distance = if q > 0.0 { (q - 1.0) * radial / q } else { -a.min(b) };
                let s = smooth_inside(distance, 2.5 * scale.max(0.5));
                let temporal = (pc < trunk_col) == temporal_left;
                let level = if temporal { temporal_level } else { nasal_level } + 6.0 * (1.0 - q * q).max(0.0);
                v = v * (1.0 - s) + level * s;
            }
            canvas.value[r * w + c] = v;
        }
    }

    // vessel tree
    let dir_t = if temporal_left { -1.0 } else { 1.0 };
    let trunk_width = rng.random_range(7.5..=9.5) * scale;
    let top = (disk_center.0 - 0.55 * dv, trunk_col);
    let bottom = (disk_center.0 + 0.55 * dv, trunk_col);
    let mut vessels = vec![Vessel {
        points: vec![top, bottom],
        width: (trunk_width, trunk_width),
        contrast: rng.random_range(35.0..=45.0),
    }];
    for vertical in [-1.0, 1.0] {
        let start = if vertical < 0.0 { top } else { bottom };
        for (horizontal, width0, reach) in [(dir_t, trunk_width * 0.85, 1.15), (-dir_t, trunk_width * 0.7, 0.7)] {
            let ctrl = (start.0 + vertical * rng.random_range(0.35..=0.5) * fov_radius, start.1);
            let end = (
                start.0 + vertical * rng.random_range(0.45..=0.6) * fov_radius,
                start.1 + horizontal * reach * rng.random_range(0.85..=1.0) * fov_radius,
            );
            let points = bezier(start, ctrl, end, 40);
            let contrast = rng.random_range(28.0..=40.0);
            // side branches
            for _ in 0..3 {
                let k = rng.random_range(10..34);
                let (p, q) = (points[k], points[k + 1]);
                let (tr, tc) = (q.0 - p.0, q.1 - p.1);
                let norm = tr.hypot(tc).max(1e-9);
                let flip: f64 = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let (nr, nc) = (-tc / norm * flip, tr / norm * flip);
                let len = rng.random_range(0.18..=0.35) * fov_radius;
                let bend = rng.random_range(-0.3..=0.3);
                let mid =
                    (p.0 + nr * len * 0.5 + tr / norm * len * bend, p.1 + nc * len * 0.5 + tc / norm * len * bend);
                let tip = (p.0 + (nr + tr / norm * 0.5) * len, p.1 + (nc + tc / norm * 0.5) * len);
                vessels.push(Vessel {
                    points: bezier(p, mid, tip, 16),
                    width: (rng.random_range(3.5..=4.5) * scale, 2.5 * scale),
                    contrast: rng.random_range(22.0..=32.0),
                });
            }
            vessels.push(Vessel { points, width: (width0, 3.0 * scale), contrast });
        }
    }
    let dark = canvas.draw_vessels(&vessels, &fov);

    // vessel-free bright structures
    let mut distractor = None;
    if options.dim_disk {
        let radius = (cfg.dim_patch_fraction * fov_radius * fov_radius).sqrt();
        let col = center.1 - side * (fov_radius - radius - 15.0 * scale);
        let row = center.0 + rng.random_range(-0.1..=0.1) * fov_radius;
        let level = (temporal_level + rng.random_range(15.0..=22.0)).min(228.0);
        canvas.paint_blob((row, col), radius, level);
    }
    if options.distractor {
        let radius = rng.random_range(28.0..=40.0) * scale;
        let level = rng.random_range(nasal_level.max(160.0)..=temporal_level);
        let clearance = dh.max(dv) / 2.0 + radius + 40.0 * scale;
        // keep vessels out of the 70x70 neighbourhood of the blob
        let vessel_free = (radius.max(50.0 * scale) + 15.0 * scale).ceil() as isize;
        let clear_of_vessels = |cand: (f64, f64)| {
            let (r0, c0) = (cand.0.round() as isize, cand.1.round() as isize);
            (-vessel_free..=vessel_free).all(|dr| {
                (-vessel_free..=vessel_free).all(|dc| {
                    let (r, c) = (r0 + dr, c0 + dc);
                    r < 0 || c < 0 || r >= h as isize || c >= w as isize || dark[r as usize * w + c as usize] < 0.5
                })
            })
        };
        let mut placed = None;
        for _ in 0..2000 {
            let ang = rng.random_range(0.0..std::f64::consts::TAU);
            let dist = rng.random_range(0.0..=(fov_radius - radius - 20.0 * scale));
            let cand = (center.0 + dist * ang.sin(), center.1 + dist * ang.cos());
            let far_from_disk = (cand.0 - disk_center.0).hypot(cand.1 - disk_center.1) > clearance;
            let far_from_patch = !options.dim_disk || (cand.1 - center.1) * side > 0.0;
            if far_from_disk && far_from_patch && clear_of_vessels(cand) {
                placed = Some(cand);
                break;
            }
        }
        if let Some(c) = placed {
            canvas.paint_blob(c, radius, level);
            distractor = Some((c.0, c.1, radius));
        }
    }

    let noise = Normal::new(0.0, cfg.noise_sigma.max(1e-9)).expect("valid sigma");
    let mut data = vec![0u8; w * h];
    for i in 0..w * h {
        if fov.data()[i] {
            let v = canvas.value[i] + noise.sample(&mut rng);
            data[i] = v.round().clamp(0.0, 255.0) as u8;
        } else {
            data[i] = rng.random_range(0..=3);
        }
    }

    Ok(Phantom {
        image: GrayImage::from_vec(w, h, data)?,
        disk,
        fov,
        info: PhantomInfo {
            seed,
            options,
            disk_center,
            horizontal_diameter: dh,
            vertical_diameter: dv,
            trunk_col,
            trunk_width,
            temporal_left,
            temporal_level,
            nasal_level,
            distractor,
        },
    })
}

/// Anti-aliased dark straight bars on a flat background, each given as
/// `(center (row, col), angle in degrees, width)`. Angles run from the column
/// axis toward the row axis, matching the rest of the crate.
pub fn bar_image(
    width: usize,
    height: usize,
    background: u8,
    contrast: f64,
    bars: &[((f64, f64), f64, f64)],
) -> GrayImage {
    GrayImage::from_fn(width, height, |r, c| {
        let cover = bars
            .iter()
            .map(|&((r0, c0), angle, w)| {
                let (sin, cos) = angle.to_radians().sin_cos();
                let d = ((r as f64 - r0) * cos - (c as f64 - c0) * sin).abs();
                (w / 2.0 + 0.5 - d).clamp(0.0, 1.0)
            })
            .fold(0.0, f64::max);
        (background as f64 - contrast * cover).round().clamp(0.0, 255.0) as u8
    })
    .expect("non-empty canvas")
}

/// Options for the `index`-th phantom of a suite: two in five get a small
/// distractor, two in five are dim-disk variants, the rest are plain.
pub fn suite_options(index: usize) -> PhantomOptions {
    match index % 5 {
        0 | 1 => PhantomOptions { distractor: true, dim_disk: false },
        2 | 3 => PhantomOptions { distractor: false, dim_disk: true },
        _ => PhantomOptions::default(),
    }
}

pub fn suite_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64)
}

/// `count` phantoms derived deterministically from `seed`.
pub fn phantom_suite(cfg: &PhantomConfig, count: usize, seed: u64) -> Result<Vec<Phantom>> {
    (0..count).map(|i| generate(cfg, suite_options(i), suite_seed(seed, i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let cfg = PhantomConfig::default();
        let a = generate(&cfg, suite_options(0), 7).unwrap();
        let b = generate(&cfg, suite_options(0), 7).unwrap();
        assert_eq!(a.image, b.image);
        assert_eq!(a.disk, b.disk);
        let c = generate(&cfg, suite_options(0), 8).unwrap();
        assert_ne!(a.image, c.image);
    }

    #[test]
    fn geometry_invariants() {
        let cfg = PhantomConfig::default();
        let (lo, hi) = cfg.scaled_diameter_range();
        for (i, p) in phantom_suite(&cfg, 10, 3).unwrap().iter().enumerate() {
            let info = &p.info;
            assert!(info.horizontal_diameter >= lo - 1e-9 && info.vertical_diameter <= hi + 1e-9, "{i}");
            // trunk crosses the disk at its center row
            let row = info.disk_center.0.round() as usize;
            assert!(p.disk.get(row, info.trunk_col.round() as usize));
            assert!(p.disk.is_subset_of(&p.fov));
            assert_eq!(info.options.distractor, i % 5 < 2);
            if let Some((r, c, _)) = info.distractor {
                assert!(!p.disk.get(r as usize, c as usize));
            }
        }
    }

    #[test]
    fn temporal_half_brighter() {
        let cfg = PhantomConfig::default();
        let p = generate(&cfg, PhantomOptions::default(), 11).unwrap();
        let info = &p.info;
        let row = info.disk_center.0.round() as usize;
        let off = (info.horizontal_diameter / 4.0) as usize;
        let t = info.trunk_col.round() as usize;
        let (left, right) = (p.image.get(row, t - off) as f64, p.image.get(row, t + off) as f64);
        if info.temporal_left {
            assert!(left > right + 15.0);
        } else {
            assert!(right > left + 15.0);
        }
    }

    #[test]
    fn rejects_tiny_canvas() {
        let cfg = PhantomConfig { width: 32, height: 32, ..PhantomConfig::default() };
        assert!(generate(&cfg, PhantomOptions::default(), 1).is_err());
    }
}
