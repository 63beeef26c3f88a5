use std::fmt;
use std::str::FromStr;

use super::GrayImage;
use crate::{Error, Result};

/// Interleaved 8-bit raster with 1 or 3 channels, as handed over by decoders.
#[derive(Debug, Clone)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if data.len() != width * height * channels {
            return Err(Error::BufferSize { width, height, channels, actual: data.len() });
        }
        Ok(Self { width, height, channels, data })
    }
}

/// Which intensity the pipeline treats as "gray level".
///
/// `Luma` uses the Rec. 601 weights `0.299 R + 0.587 G + 0.114 B`, computed in
/// integer arithmetic as `(299 R + 587 G + 114 B + 500) / 1000`. A pure red
/// pixel therefore maps to 76.
///
/// Single-channel input is passed through unchanged by every mode. `Raw` is
/// only valid for single-channel input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelMode {
    Luma,
    Red,
    #[default]
    Green,
    Raw,
}

impl ChannelMode {
    pub fn name(self) -> &'static str {
        match self {
            ChannelMode::Luma => "luma",
            ChannelMode::Red => "red",
            ChannelMode::Green => "green",
            ChannelMode::Raw => "raw",
        }
    }
}

impl fmt::Display for ChannelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "luma" => Ok(ChannelMode::Luma),
            "red" => Ok(ChannelMode::Red),
            "green" => Ok(ChannelMode::Green),
            "raw" => Ok(ChannelMode::Raw),
            other => Err(format!("unknown channel mode '{other}' (expected luma, red, green or raw)")),
        }
    }
}

pub fn to_gray(image: &Raster, mode: ChannelMode) -> Result<GrayImage> {
    match image.channels {
        1 => GrayImage::from_vec(image.width, image.height, image.data.clone()),
        3 => {
            let pick: fn(&[u8]) -> u8 = match mode {
                ChannelMode::Luma => {
                    |px| ((299 * px[0] as u32 + 587 * px[1] as u32 + 114 * px[2] as u32 + 500) / 1000) as u8
                }
                ChannelMode::Red => |px| px[0],
                ChannelMode::Green => |px| px[1],
                ChannelMode::Raw => {
                    return Err(Error::UnsupportedChannels { channels: 3, mode: mode.name() });
                }
            };
            let data = image.data.chunks_exact(3).map(pick).collect();
            GrayImage::from_vec(image.width, image.height, data)
        }
        channels => Err(Error::UnsupportedChannels { channels, mode: mode.name() }),
    }
}
