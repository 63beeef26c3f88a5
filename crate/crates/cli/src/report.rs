//! Per-image CSV, JSON summary and the human-readable results table.

use std::fmt::Write as _;
use std::io::Write;

use discseg_core::{BatchReport, EvalRecord, MetricMeans};
use serde::Serialize;

pub const CSV_HEADER: [&str; 10] =
    ["image_id", "tp", "fp", "tn", "fn", "sensitivity", "specificity", "overlap", "located", "elapsed_s"];

/// Bumped whenever a field of [`Summary`] changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

pub fn write_csv<W: Write>(records: &[EvalRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let c = r.counts;
        w.write_record([
            r.image_id.clone(),
            c.tp.to_string(),
            c.fp.to_string(),
            c.tn.to_string(),
            c.fn_.to_string(),
            format!("{:.6}", r.metrics.sensitivity),
            format!("{:.6}", r.metrics.specificity),
            format!("{:.6}", r.metrics.overlap),
            r.located.to_string(),
            format!("{:.6}", r.elapsed),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub image_id: String,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub schema_version: u32,
    pub images: usize,
    pub all: &'a MetricMeans,
    pub located_only: Option<&'a MetricMeans>,
    /// Percentage of evaluated images whose located center fell inside the
    /// ground-truth disk.
    pub success_rate: f64,
    pub errors: &'a [RowError],
}

impl<'a> Summary<'a> {
    pub fn new(report: &'a BatchReport, errors: &'a [RowError]) -> Self {
        Summary {
            schema_version: SCHEMA_VERSION,
            images: report.records.len(),
            all: &report.all,
            located_only: report.located_only.as_ref(),
            success_rate: report.success_rate,
            errors,
        }
    }
}

/// Means in the layout of a results table: one row over all images, one
/// over the located ones, then the localization success rate.
pub fn format_table(report: &BatchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<14} {:>6} {:>12} {:>12} {:>9} {:>9}",
        "subset", "images", "sensitivity", "specificity", "overlap", "time_s"
    );
    let mut row = |name: &str, m: Option<&MetricMeans>| {
        let _ = match m {
            Some(m) => writeln!(
                s,
                "{:<14} {:>6} {:>12.4} {:>12.4} {:>9.4} {:>9.3}",
                name, m.count, m.mean_sensitivity, m.mean_specificity, m.mean_overlap, m.mean_elapsed
            ),
            None => writeln!(s, "{:<14} {:>6} {:>12} {:>12} {:>9} {:>9}", name, 0, "-", "-", "-", "-"),
        };
    };
    row("all", Some(&report.all));
    row("located only", report.located_only.as_ref());
    let _ = writeln!(s, "localization success: {:.1}%", report.success_rate);
    s
}
