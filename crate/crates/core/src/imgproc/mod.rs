//! Image primitives shared by every pipeline stage.
//!
//! Everything here is written from scratch against two small raster types:
//! [`GrayImage`] (8-bit intensities) and [`BinaryMask`]. Coordinates are
//! always `(row, col)` with rows growing downwards; angles are in degrees,
//! measured from the +column axis towards the +row axis.

mod color;
mod components;
mod morphology;
mod radon;
mod sobel;
mod threshold;

pub use color::{to_gray, ChannelMode, Raster};
pub use components::{circularity, connected_components, fill_holes, largest_component, trace_contour, Region};
pub use morphology::{morph_close, morph_dilate, morph_erode, morph_open, morph_reconstruct};
pub use radon::{
    angle_set, radon_direction, radon_projection_energy, RadonEstimate, MIN_RADON_SIDE, RADON_CONFIDENCE_RATIO,
};
pub use sobel::{directional_gradient, sobel, unit_vector, GradientField};
pub use threshold::{
    binarize, histogram, otsu_from_histogram, otsu_threshold, percentile_threshold, percentile_threshold_masked,
};

use serde::Serialize;

use crate::{Error, Result};

/// Integer pixel position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PixelCoord {
    pub row: usize,
    pub col: usize,
}

impl PixelCoord {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// Axis-aligned rectangle with half-open bounds: rows `top..bottom`, columns
/// `left..right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Rect {
    pub top: usize,
    pub left: usize,
    pub bottom: usize,
    pub right: usize,
}

impl Rect {
    pub fn new(top: usize, left: usize, bottom: usize, right: usize) -> Self {
        Self { top, left, bottom, right }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self::new(0, 0, height, width)
    }

    /// Square of side `side` centered on `center`, shifted (not shrunk) to
    /// stay inside a `width`×`height` image when possible.
    pub fn centered_square(center: PixelCoord, side: usize, width: usize, height: usize) -> Self {
        let place = |c: usize, extent: usize| -> (usize, usize) {
            let side = side.min(extent);
            let start = c.saturating_sub(side / 2).min(extent - side);
            (start, start + side)
        };
        let (top, bottom) = place(center.row, height);
        let (left, right) = place(center.col, width);
        Self { top, left, bottom, right }
    }

    /// Rectangle spanning `center ± half` in both directions, clipped to the image.
    pub fn around(center: PixelCoord, half_rows: usize, half_cols: usize, width: usize, height: usize) -> Self {
        Self {
            top: center.row.saturating_sub(half_rows),
            left: center.col.saturating_sub(half_cols),
            bottom: (center.row + half_rows + 1).min(height),
            right: (center.col + half_cols + 1).min(width),
        }
    }

    pub fn width(&self) -> usize {
        self.right.saturating_sub(self.left)
    }

    pub fn height(&self) -> usize {
        self.bottom.saturating_sub(self.top)
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        self.width() == 0 || self.height() == 0
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row >= self.top && row < self.bottom && col >= self.left && col < self.right
    }

    pub fn clip(&self, width: usize, height: usize) -> Self {
        Self {
            top: self.top.min(height),
            left: self.left.min(width),
            bottom: self.bottom.min(height),
            right: self.right.min(width),
        }
    }

    pub fn fits_in(&self, width: usize, height: usize) -> bool {
        !self.is_empty() && self.bottom <= height && self.right <= width
    }
}

/// Single-channel 8-bit raster stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, 0)
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        Ok(Self { width, height, data: vec![value; width * height] })
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if data.len() != width * height {
            return Err(Error::BufferSize { width, height, channels: 1, actual: data.len() });
        }
        Ok(Self { width, height, data })
    }

    /// Build an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut img = Self::new(width, height)?;
        for row in 0..height {
            for col in 0..width {
                img.data[row * width + col] = f(row, col);
            }
        }
        Ok(img)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.data[row * self.width + col] = value;
    }

    /// Replicate-padded access.
    #[inline]
    pub fn get_clamped(&self, row: isize, col: isize) -> u8 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.get(r, c)
    }

    pub fn crop(&self, rect: Rect) -> Result<GrayImage> {
        if !rect.fits_in(self.width, self.height) {
            return Err(Error::EmptyRoi(rect));
        }
        let mut data = Vec::with_capacity(rect.area());
        for row in rect.top..rect.bottom {
            data.extend_from_slice(&self.data[row * self.width + rect.left..row * self.width + rect.right]);
        }
        GrayImage::from_vec(rect.width(), rect.height(), data)
    }

    pub fn transpose(&self) -> GrayImage {
        let mut out = vec![0u8; self.data.len()];
        for row in 0..self.height {
            for col in 0..self.width {
                out[col * self.height + row] = self.get(row, col);
            }
        }
        GrayImage { width: self.height, height: self.width, data: out }
    }

    /// Add `delta` to every pixel, saturating at 0 and 255.
    pub fn shifted(&self, delta: i32) -> GrayImage {
        let data = self.data.iter().map(|&v| (v as i32 + delta).clamp(0, 255) as u8).collect();
        GrayImage { width: self.width, height: self.height, data }
    }

    pub fn min_max(&self) -> (u8, u8) {
        self.data.iter().fold((u8::MAX, u8::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn mean_in(&self, rect: Rect) -> f64 {
        let rect = rect.clip(self.width, self.height);
        if rect.is_empty() {
            return 0.0;
        }
        let mut sum = 0u64;
        for row in rect.top..rect.bottom {
            for col in rect.left..rect.right {
                sum += self.get(row, col) as u64;
            }
        }
        sum as f64 / rect.area() as f64
    }
}

/// Boolean raster with the same layout as [`GrayImage`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![false; width * height] }
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        Self { width, height, data: vec![value; width * height] }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::BufferSize { width, height, channels: 1, actual: data.len() });
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut mask = Self::new(width, height);
        for row in 0..height {
            for col in 0..width {
                mask.data[row * width + col] = f(row, col);
            }
        }
        mask
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.width + col]
    }

    /// Out-of-bounds reads are `false`.
    #[inline]
    pub fn get_or_false(&self, row: isize, col: isize) -> bool {
        row >= 0
            && col >= 0
            && (row as usize) < self.height
            && (col as usize) < self.width
            && self.get(row as usize, col as usize)
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row * self.width + col] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&v| v)
    }

    pub fn check_same_dims(&self, other: &BinaryMask) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch { left: self.dims(), right: other.dims() });
        }
        Ok(())
    }

    pub fn and(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.check_same_dims(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a && b).collect();
        Ok(BinaryMask { width: self.width, height: self.height, data })
    }

    pub fn or(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.check_same_dims(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a || b).collect();
        Ok(BinaryMask { width: self.width, height: self.height, data })
    }

    pub fn and_not(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.check_same_dims(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a && !b).collect();
        Ok(BinaryMask { width: self.width, height: self.height, data })
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dims() == other.dims() && self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }

    /// Clear every pixel outside `rect`.
    pub fn restricted_to(&self, rect: Rect) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |r, c| rect.contains(r, c) && self.get(r, c))
    }

    pub fn iter_true(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        let width = self.width;
        self.data.iter().enumerate().filter(|(_, &v)| v).map(move |(i, _)| PixelCoord::new(i / width, i % width))
    }

    /// Tight bounding box of the true pixels, `None` for an empty mask.
    pub fn bounding_rect(&self) -> Option<Rect> {
        let mut rect: Option<Rect> = None;
        for p in self.iter_true() {
            let r = rect.get_or_insert(Rect::new(p.row, p.col, p.row + 1, p.col + 1));
            r.top = r.top.min(p.row);
            r.left = r.left.min(p.col);
            r.bottom = r.bottom.max(p.row + 1);
            r.right = r.right.max(p.col + 1);
        }
        rect
    }

    /// Encode as 8-bit gray with values exactly 0 and 255.
    pub fn to_gray(&self) -> GrayImage {
        let data = self.data.iter().map(|&v| if v { 255 } else { 0 }).collect();
        GrayImage { width: self.width, height: self.height, data }
    }
}
