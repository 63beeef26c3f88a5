use super::{BinaryMask, GrayImage, Rect};
use crate::{Error, Result};

/// 256-bin histogram of `img` inside `roi`, optionally restricted to `mask`.
pub fn histogram(img: &GrayImage, roi: Option<Rect>, mask: Option<&BinaryMask>) -> [u64; 256] {
    let roi = roi.unwrap_or(Rect::full(img.width(), img.height())).clip(img.width(), img.height());
    let mut hist = [0u64; 256];
    for row in roi.top..roi.bottom {
        for col in roi.left..roi.right {
            if mask.is_none_or(|m| m.get(row, col)) {
                hist[img.get(row, col) as usize] += 1;
            }
        }
    }
    hist
}

fn check_fraction(fraction: f64) -> Result<()> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter { name: "fraction", reason: format!("{fraction} is outside (0, 1]") });
    }
    Ok(())
}

/// Largest intensity `t` such that at least `fraction` of the pixels are `>= t`.
///
/// Binarizing at the returned value selects the top `fraction` of pixels,
/// plus whatever else shares bin `t`.
pub fn percentile_threshold(img: &GrayImage, fraction: f64) -> Result<u8> {
    percentile_threshold_masked(img, fraction, None)
}

/// [`percentile_threshold`] computed over the pixels of `mask` only. An empty
/// mask falls back to the whole image.
pub fn percentile_threshold_masked(img: &GrayImage, fraction: f64, mask: Option<&BinaryMask>) -> Result<u8> {
    check_fraction(fraction)?;
    let mut hist = histogram(img, None, mask);
    let mut total: u64 = hist.iter().sum();
    if total == 0 {
        hist = histogram(img, None, None);
        total = hist.iter().sum();
    }
    // ceil with a little slack so 0.13 * 100 asks for 13 pixels, not 14
    let needed = ((fraction * total as f64) - 1e-9).ceil().max(1.0) as u64;
    let mut above = 0u64;
    for t in (0..256).rev() {
        above += hist[t];
        if above >= needed {
            return Ok(t as u8);
        }
    }
    Ok(0)
}

/// `true` where intensity `>= t`. A threshold of 256 yields an empty mask.
pub fn binarize(img: &GrayImage, t: u16) -> BinaryMask {
    let data = img.data().iter().map(|&v| v as u16 >= t).collect();
    BinaryMask::from_vec(img.width(), img.height(), data).expect("same dimensions")
}

/// Otsu threshold of a histogram.
///
/// Classes are `v < t` and `v >= t`. Returns the smallest `t` maximizing the
/// between-class variance. A histogram with a single occupied bin returns that
/// bin's value; an empty histogram returns `None`.
pub fn otsu_from_histogram(hist: &[u64; 256]) -> Option<u8> {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return None;
    }
    let occupied: Vec<usize> = (0..256).filter(|&v| hist[v] > 0).collect();
    if occupied.len() == 1 {
        return Some(occupied[0] as u8);
    }
    let n = total as i128;
    let sum_all: i128 = hist.iter().enumerate().map(|(v, &h)| v as i128 * h as i128).sum();

    let mut n_below = 0i128;
    let mut sum_below = 0i128;
    let mut best_t = 0usize;
    let mut best_var = -1.0f64;
    for t in 1..256 {
        n_below += hist[t - 1] as i128;
        sum_below += (t as i128 - 1) * hist[t - 1] as i128;
        let n_above = n - n_below;
        if n_below == 0 || n_above == 0 {
            continue;
        }
        // sigma_b^2 * n^2 = (n * S0 - n0 * S)^2 / (n0 * n1); the numerator is exact
        let diff = (n * sum_below - n_below * sum_all) as f64;
        let var = diff * diff / (n_below as f64 * n_above as f64);
        if var > best_var {
            best_var = var;
            best_t = t;
        }
    }
    Some(best_t as u8)
}

/// Otsu threshold over `roi` (whole image when `None`).
pub fn otsu_threshold(img: &GrayImage, roi: Option<Rect>) -> Result<u8> {
    if let Some(r) = roi {
        if !r.fits_in(img.width(), img.height()) {
            return Err(Error::EmptyRoi(r));
        }
    }
    let hist = histogram(img, roi, None);
    otsu_from_histogram(&hist).ok_or(Error::EmptyRoi(roi.unwrap_or(Rect::full(img.width(), img.height()))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp100() -> GrayImage {
        GrayImage::from_fn(10, 10, |r, c| (r * 10 + c) as u8).unwrap()
    }

    #[test]
    fn percentile_constant_image() {
        let img = GrayImage::filled(7, 5, 42).unwrap();
        assert_eq!(percentile_threshold(&img, 0.13).unwrap(), 42);
    }

    #[test]
    fn percentile_ramp() {
        // brute force: largest t with #{v >= t} >= 13
        let img = ramp100();
        let brute =
            (0..=255u16).filter(|&t| img.data().iter().filter(|&&v| v as u16 >= t).count() >= 13).max().unwrap();
        assert_eq!(brute, 87);
        assert_eq!(percentile_threshold(&img, 0.13).unwrap(), 87);
    }

    #[test]
    fn percentile_full_fraction_is_min() {
        let img = GrayImage::from_fn(9, 4, |r, c| (17 + r * 3 + c) as u8).unwrap();
        assert_eq!(percentile_threshold(&img, 1.0).unwrap(), 17);
    }

    #[test]
    fn percentile_rejects_bad_fraction() {
        let img = ramp100();
        assert!(percentile_threshold(&img, 0.0).is_err());
        assert!(percentile_threshold(&img, 1.5).is_err());
        assert!(percentile_threshold(&img, f64::NAN).is_err());
    }

    #[test]
    fn percentile_masked_ignores_outside() {
        let img = GrayImage::from_fn(10, 10, |r, _| if r < 5 { 0 } else { 100 + r as u8 }).unwrap();
        let mask = BinaryMask::from_fn(10, 10, |r, _| r >= 5);
        // 50 masked pixels, top 20% = 10 pixels = row 9
        assert_eq!(percentile_threshold_masked(&img, 0.2, Some(&mask)).unwrap(), 109);
        let empty = BinaryMask::new(10, 10);
        assert_eq!(
            percentile_threshold_masked(&img, 0.2, Some(&empty)).unwrap(),
            percentile_threshold(&img, 0.2).unwrap()
        );
    }

    #[test]
    fn binarize_extremes() {
        let img = ramp100();
        assert_eq!(binarize(&img, 0).count(), 100);
        assert_eq!(binarize(&img, 256).count(), 0);
        let two = GrayImage::from_fn(4, 4, |r, c| if (r + c) % 2 == 0 { 10 } else { 200 }).unwrap();
        let m = binarize(&two, 100);
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(m.get(r, c), two.get(r, c) == 200);
            }
        }
    }

    #[test]
    fn otsu_two_spikes_smallest_tie() {
        let img = GrayImage::from_fn(10, 10, |r, _| if r < 5 { 50 } else { 200 }).unwrap();
        assert_eq!(otsu_threshold(&img, None).unwrap(), 51);
    }

    #[test]
    fn otsu_constant_returns_value() {
        let img = GrayImage::filled(6, 6, 77).unwrap();
        assert_eq!(otsu_threshold(&img, None).unwrap(), 77);
    }

    #[test]
    fn otsu_roi_errors() {
        let img = ramp100();
        assert!(otsu_threshold(&img, Some(Rect::new(2, 2, 2, 5))).is_err());
        assert!(otsu_threshold(&img, Some(Rect::new(0, 0, 11, 5))).is_err());
        assert!(otsu_threshold(&img, Some(Rect::new(0, 0, 5, 5))).is_ok());
    }

    #[test]
    fn otsu_roi_uses_only_roi() {
        let img = GrayImage::from_fn(20, 10, |_, c| if c < 10 { (c * 20) as u8 } else { 7 }).unwrap();
        let t = otsu_threshold(&img, Some(Rect::new(0, 10, 10, 20))).unwrap();
        assert_eq!(t, 7);
    }
}
