use serde::Serialize;

use crate::imgproc::GrayImage;
use crate::locator::{locate_disk, LocatorConfig, LocatorOutcome};
use crate::segmenter::{segment_disk, SegmentationResult, SegmenterConfig};
use crate::vessels::VesselConfig;
use crate::Result;

/// Every tunable of the localization and segmentation pipeline.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DiskConfig {
    pub locator: LocatorConfig,
    pub vessels: VesselConfig,
    pub segmenter: SegmenterConfig,
}

impl DiskConfig {
    pub fn validate(&self) -> Result<()> {
        self.locator.validate()?;
        self.vessels.validate()?;
        self.segmenter.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiskAnalysis {
    pub location: LocatorOutcome,
    pub segmentation: SegmentationResult,
}

/// Locate, then segment.
pub fn analyze(img: &GrayImage, cfg: &DiskConfig) -> Result<DiskAnalysis> {
    cfg.validate()?;
    let location = locate_disk(img, &cfg.locator, &cfg.vessels)?;
    let segmentation = segment_disk(img, &location, &cfg.segmenter, &cfg.vessels)?;
    Ok(DiskAnalysis { location, segmentation })
}
