//! Pixel-level evaluation against ground-truth disk masks.
//!
//! Overlap is the Jaccard index `|A ∩ B| / |A ∪ B|` of ground truth `A` and
//! prediction `B`. Zero denominators resolve to 1.0 ("nothing to get
//! wrong"), except that an empty ground truth with a non-empty prediction has
//! overlap 0.0.

use serde::Serialize;

use crate::imgproc::{BinaryMask, PixelCoord};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapMetrics {
    pub sensitivity: f64,
    pub specificity: f64,
    pub overlap: f64,
}

/// Per-pixel confusion counts, restricted to `fov` when given.
pub fn confusion(pred: &BinaryMask, gt: &BinaryMask, fov: Option<&BinaryMask>) -> Result<ConfusionCounts> {
    pred.check_same_dims(gt)?;
    if let Some(f) = fov {
        pred.check_same_dims(f)?;
    }
    let mut counts = ConfusionCounts::default();
    for (i, (&p, &g)) in pred.data().iter().zip(gt.data()).enumerate() {
        if fov.is_some_and(|f| !f.data()[i]) {
            continue;
        }
        match (p, g) {
            (true, true) => counts.tp += 1,
            (true, false) => counts.fp += 1,
            (false, false) => counts.tn += 1,
            (false, true) => counts.fn_ += 1,
        }
    }
    Ok(counts)
}

fn ratio_or_one(num: u64, den: u64) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Sensitivity, specificity and overlap from confusion counts.
pub fn metrics_from_counts(c: &ConfusionCounts) -> OverlapMetrics {
    let union = c.tp + c.fp + c.fn_;
    OverlapMetrics {
        sensitivity: ratio_or_one(c.tp, c.tp + c.fn_),
        specificity: ratio_or_one(c.tn, c.tn + c.fp),
        overlap: ratio_or_one(c.tp, union),
    }
}

/// A localization counts as successful when the predicted center falls on a
/// ground-truth disk pixel (boundary included).
pub fn localization_success(center: PixelCoord, gt: &BinaryMask) -> bool {
    center.row < gt.height() && center.col < gt.width() && gt.get(center.row, center.col)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord {
    pub image_id: String,
    pub counts: ConfusionCounts,
    pub metrics: OverlapMetrics,
    pub located: bool,
    /// Wall time of the whole per-image pipeline, seconds.
    pub elapsed: f64,
}

impl EvalRecord {
    pub fn new(image_id: impl Into<String>, counts: ConfusionCounts, located: bool, elapsed: f64) -> Self {
        Self { image_id: image_id.into(), counts, metrics: metrics_from_counts(&counts), located, elapsed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricMeans {
    pub count: usize,
    pub mean_sensitivity: f64,
    pub mean_specificity: f64,
    pub mean_overlap: f64,
    pub mean_elapsed: f64,
}

impl MetricMeans {
    fn over<'a>(records: impl Iterator<Item = &'a EvalRecord>) -> Option<Self> {
        let mut n = 0usize;
        let (mut se, mut sp, mut ov, mut t) = (0.0, 0.0, 0.0, 0.0);
        for r in records {
            n += 1;
            se += r.metrics.sensitivity;
            sp += r.metrics.specificity;
            ov += r.metrics.overlap;
            t += r.elapsed;
        }
        (n > 0).then(|| {
            let k = n as f64;
            MetricMeans {
                count: n,
                mean_sensitivity: se / k,
                mean_specificity: sp / k,
                mean_overlap: ov / k,
                mean_elapsed: t / k,
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    /// Sorted by `image_id`.
    pub records: Vec<EvalRecord>,
    /// Means over every record.
    pub all: MetricMeans,
    /// Means over records whose disk was located; `None` if there are none.
    pub located_only: Option<MetricMeans>,
    /// Percentage of located images, 0–100.
    pub success_rate: f64,
}

/// Fold per-image records into a report. Records are sorted by id first so
/// the result does not depend on arrival order.
pub fn aggregate(mut records: Vec<EvalRecord>) -> Result<BatchReport> {
    if records.is_empty() {
        return Err(Error::EmptyBatch);
    }
    records.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    let all = MetricMeans::over(records.iter()).expect("non-empty");
    let located_only = MetricMeans::over(records.iter().filter(|r| r.located));
    let located = records.iter().filter(|r| r.located).count();
    let success_rate = 100.0 * located as f64 / records.len() as f64;
    Ok(BatchReport { records, all, located_only, success_rate })
}
