use super::GrayImage;
use crate::{Error, Result};

pub const MIN_RADON_SIDE: usize = 15;

/// Windows whose peak-to-median projection variance falls below this ratio
/// have no dominant linear structure.
pub const RADON_CONFIDENCE_RATIO: f64 = 1.5;

/// `n` equally spaced angles covering `[0°, 180°)`.
pub fn angle_set(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 * 180.0 / n as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadonEstimate {
    /// Orientation of the dominant linear structure, degrees in `[0, 180)`.
    pub angle: f64,
    /// Peak projection variance over the median across angles.
    pub score: f64,
    pub confident: bool,
}

struct Disk {
    // (dx, dy, value - mean) for every pixel inside the inscribed circle
    samples: Vec<(f64, f64, f64)>,
    radius: f64,
}

fn inscribed_samples(window: &GrayImage) -> Disk {
    let side = window.width();
    let c = (side as f64 - 1.0) / 2.0;
    let radius = c;
    let mut samples = Vec::with_capacity(side * side);
    for r in 0..side {
        for col in 0..side {
            let (dx, dy) = (col as f64 - c, r as f64 - c);
            if dx * dx + dy * dy <= radius * radius + 1e-9 {
                samples.push((dx, dy, window.get(r, col) as f64));
            }
        }
    }
    let mean = samples.iter().map(|s| s.2).sum::<f64>() / samples.len() as f64;
    for s in &mut samples {
        s.2 -= mean;
    }
    Disk { samples, radius }
}

fn projection_energy(disk: &Disk, angle_deg: f64) -> f64 {
    let (sin, cos) = angle_deg.to_radians().sin_cos();
    let half = disk.radius.ceil() as usize + 1;
    let mut bins = vec![0.0f64; 2 * half + 1];
    for &(dx, dy, v) in &disk.samples {
        // offset of the line through (dx, dy) running along the angle
        let rho = -dx * sin + dy * cos + half as f64;
        let lo = rho.floor();
        let frac = rho - lo;
        let lo = lo as usize;
        bins[lo] += v * (1.0 - frac);
        bins[lo + 1] += v * frac;
    }
    // projections sum to zero, so the variance is the mean square
    bins.iter().map(|b| b * b).sum::<f64>() / bins.len() as f64
}

fn check_window(window: &GrayImage) -> Result<()> {
    if window.width() != window.height() || window.width() < MIN_RADON_SIDE {
        return Err(Error::ImageTooSmall { width: window.width(), height: window.height(), min: MIN_RADON_SIDE });
    }
    Ok(())
}

/// Variance across offsets of the mean-removed Radon projection at one angle,
/// restricted to the window's inscribed circle.
pub fn radon_projection_energy(window: &GrayImage, angle_deg: f64) -> Result<f64> {
    check_window(window)?;
    Ok(projection_energy(&inscribed_samples(window), angle_deg))
}

/// Orientation of the dominant linear structure in a square window.
///
/// Line integrals are taken over the inscribed circle after removing the mean,
/// so a flat window projects to zero at every angle. The angle whose
/// projection varies most across offsets wins; ties go to the first angle.
pub fn radon_direction(window: &GrayImage, angles: &[f64]) -> Result<RadonEstimate> {
    check_window(window)?;
    if angles.is_empty() {
        return Err(Error::InvalidParameter { name: "angles", reason: "empty angle set".into() });
    }
    let disk = inscribed_samples(window);
    let energies: Vec<f64> = angles.iter().map(|&a| projection_energy(&disk, a)).collect();
    let (best, &peak) =
        energies.iter().enumerate().fold((0, &f64::NEG_INFINITY), |acc, (i, e)| if *e > *acc.1 { (i, e) } else { acc });
    let mut sorted = energies.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    let score = if median > 1e-9 {
        peak / median
    } else if peak > 1e-9 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(RadonEstimate { angle: angles[best].rem_euclid(180.0), score, confident: score >= RADON_CONFIDENCE_RATIO })
}
