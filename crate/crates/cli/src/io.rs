//! Reading and writing images and masks.

use std::path::{Path, PathBuf};

use discseg_core::imgproc::{to_gray, ChannelMode, Raster};
use discseg_core::{BinaryMask, GrayImage, PixelCoord, Rect};
use image::{DynamicImage, ImageBuffer, Luma, Rgb};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot decode {path}: {source}")]
    Decode { path: PathBuf, source: image::ImageError },
    #[error("cannot write {path}: {source}")]
    Encode { path: PathBuf, source: image::ImageError },
    #[error("{path}: {source}")]
    Pixels { path: PathBuf, source: discseg_core::Error },
    #[error("{path} is {actual:?}, expected {expected:?}")]
    Dimensions { path: PathBuf, actual: (usize, usize), expected: (usize, usize) },
}

/// Decode any format the `image` crate knows (PNG, TIFF, PNM, ...) into an
/// 8-bit raster with one channel for gray input and three for color input.
pub fn load_raster(path: &Path) -> Result<Raster, IoError> {
    let img = image::open(path).map_err(|source| IoError::Decode { path: path.into(), source })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (channels, data) =
        if img.color().has_color() { (3, img.into_rgb8().into_raw()) } else { (1, img.into_luma8().into_raw()) };
    Raster::new(w, h, channels, data).map_err(|source| IoError::Pixels { path: path.into(), source })
}

pub fn load_gray(path: &Path, mode: ChannelMode) -> Result<GrayImage, IoError> {
    let raster = load_raster(path)?;
    to_gray(&raster, mode).map_err(|source| IoError::Pixels { path: path.into(), source })
}

/// Masks are read from any image: nonzero (in any channel) means inside.
pub fn load_mask(path: &Path) -> Result<BinaryMask, IoError> {
    let raster = load_raster(path)?;
    let c = raster.channels;
    let data = raster.data.chunks_exact(c).map(|px| px.iter().any(|&v| v != 0)).collect();
    BinaryMask::from_vec(raster.width, raster.height, data)
        .map_err(|source| IoError::Pixels { path: path.into(), source })
}

/// Load a mask and require it to match the image it belongs to.
pub fn load_mask_sized(path: &Path, dims: (usize, usize)) -> Result<BinaryMask, IoError> {
    let mask = load_mask(path)?;
    if mask.dims() != dims {
        return Err(IoError::Dimensions { path: path.into(), actual: mask.dims(), expected: dims });
    }
    Ok(mask)
}

pub fn save_gray(img: &GrayImage, path: &Path) -> Result<(), IoError> {
    let buf: ImageBuffer<Luma<u8>, _> =
        ImageBuffer::from_raw(img.width() as u32, img.height() as u32, img.data().to_vec()).expect("buffer size");
    DynamicImage::ImageLuma8(buf).save(path).map_err(|source| IoError::Encode { path: path.into(), source })
}

/// Masks are written as 8-bit images with values 0 and 255.
pub fn save_mask(mask: &BinaryMask, path: &Path) -> Result<(), IoError> {
    save_gray(&mask.to_gray(), path)
}

const CONTOUR: [u8; 3] = [255, 40, 40];
const SPLIT: [u8; 3] = [40, 200, 255];
const CENTER: [u8; 3] = [255, 230, 0];

/// The input image in gray with the disk boundary, the split column inside
/// the disk rectangle and the located center drawn on top.
pub fn overlay(img: &GrayImage, boundary: &[PixelCoord], rect: Rect, split_col: usize, center: PixelCoord) -> Vec<u8> {
    let (w, h) = img.dims();
    let mut rgb: Vec<u8> = img.data().iter().flat_map(|&v| [v, v, v]).collect();
    let mut paint = |r: usize, c: usize, color: [u8; 3]| {
        if r < h && c < w {
            let i = 3 * (r * w + c);
            rgb[i..i + 3].copy_from_slice(&color);
        }
    };
    for r in rect.top..rect.bottom {
        paint(r, split_col, SPLIT);
    }
    for p in boundary {
        paint(p.row, p.col, CONTOUR);
    }
    for d in -3i64..=3 {
        let (r, c) = (center.row as i64, center.col as i64);
        if r + d >= 0 {
            paint((r + d) as usize, center.col, CENTER);
        }
        if c + d >= 0 {
            paint(center.row, (c + d) as usize, CENTER);
        }
    }
    rgb
}

pub fn save_rgb(width: usize, height: usize, rgb: Vec<u8>, path: &Path) -> Result<(), IoError> {
    let buf: ImageBuffer<Rgb<u8>, _> = ImageBuffer::from_raw(width as u32, height as u32, rgb).expect("buffer size");
    DynamicImage::ImageRgb8(buf).save(path).map_err(|source| IoError::Encode { path: path.into(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_and_mask_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let img = GrayImage::from_fn(13, 7, |r, c| (r * 13 + c) as u8 * 2).unwrap();
        let p = dir.path().join("g.png");
        save_gray(&img, &p).unwrap();
        assert_eq!(load_gray(&p, ChannelMode::Green).unwrap(), img);

        let mask = BinaryMask::from_fn(13, 7, |r, c| (r + c) % 3 == 0);
        let p = dir.path().join("m.png");
        save_mask(&mask, &p).unwrap();
        assert_eq!(load_mask(&p).unwrap(), mask);
        assert!(load_mask_sized(&p, (13, 7)).is_ok());
        assert!(matches!(load_mask_sized(&p, (7, 13)), Err(IoError::Dimensions { .. })));
        let raw = image::open(&p).unwrap().into_luma8().into_raw();
        assert!(raw.iter().all(|&v| v == 0 || v == 255));
    }

    #[test]
    fn color_input_uses_channel_mode() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.png");
        save_rgb(2, 1, vec![10, 20, 30, 40, 50, 60], &p).unwrap();
        assert_eq!(load_gray(&p, ChannelMode::Green).unwrap().data(), &[20, 50]);
        assert_eq!(load_gray(&p, ChannelMode::Red).unwrap().data(), &[10, 40]);
        assert!(load_gray(&p, ChannelMode::Raw).is_err());
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_gray(Path::new("/nonexistent/x.png"), ChannelMode::Green).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/x.png"));
    }

    #[test]
    fn overlay_marks_contour() {
        let img = GrayImage::filled(10, 10, 7).unwrap();
        let rgb = overlay(&img, &[PixelCoord::new(1, 1)], Rect::new(0, 0, 10, 10), 8, PixelCoord::new(5, 5));
        assert_eq!(&rgb[3 * 11..3 * 12], &CONTOUR);
        assert_eq!(&rgb[3 * 8..3 * 9], &SPLIT);
        assert_eq!(&rgb[3 * 55..3 * 56], &CENTER);
        assert_eq!(&rgb[0..3], &[7, 7, 7]);
    }
}
