//! Optic disk localization and segmentation for retinal fundus images.
//!
//! The pipeline runs in three stages:
//!
//! 1. **Locate** ([`locator`]) – take the brightest fraction of the field of
//!    view, keep roughly circular connected components, and pick the one whose
//!    surrounding window has the widest blood vessels. The bright fraction is
//!    relaxed step by step until some candidate passes.
//! 2. **Vessels** ([`vessels`]) – windowed Radon orientation, directional Sobel
//!    profiles and edge-pair validation give a vessel mask and width estimates.
//! 3. **Segment** ([`segmenter`]) – move the center onto the vessel trunk, find
//!    the left and right disk rim, build the circumscribing rectangle, split it
//!    at the main vertical vessel and threshold each half with Otsu's method.
//!
//! [`metrics`] scores masks against ground truth and [`phantom`] renders
//! synthetic fundus images with known disks for testing.

pub mod error;
pub mod imgproc;
pub mod locator;
pub mod metrics;
pub mod phantom;
pub mod pipeline;
pub mod segmenter;
pub mod vessels;

pub use error::{Error, Result};
pub use imgproc::{BinaryMask, ChannelMode, GradientField, GrayImage, PixelCoord, Raster, Rect, Region};
pub use locator::{locate_disk, LocatorConfig, LocatorOutcome};
pub use metrics::{BatchReport, ConfusionCounts, EvalRecord, MetricMeans, OverlapMetrics};
pub use pipeline::{analyze, DiskAnalysis, DiskConfig};
pub use segmenter::{segment_disk, DiskBox, SegmentationResult, SegmenterConfig, TemporalSide};
pub use vessels::{VesselConfig, VesselResult, VesselSegment};
