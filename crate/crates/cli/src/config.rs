//! `key = value` configuration files.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Unknown keys are errors. `discseg config` prints every key with its
//! default and a one-line description.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use discseg_core::{ChannelMode, DiskConfig};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value `{value}` for `{key}`: {reason}")]
    BadValue { line: usize, key: String, value: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(#[from] discseg_core::Error),
    #[error("cannot read {path}: {reason}")]
    Read { path: String, reason: String },
}

/// Everything a run needs besides its inputs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineConfig {
    pub disk: DiskConfig,
    pub channel: ChannelMode,
    /// Worker threads for batch commands; 0 lets the pool decide.
    pub threads: usize,
}

type Getter = fn(&PipelineConfig) -> String;
type Setter = fn(&mut PipelineConfig, &str) -> Result<(), String>;

struct Key {
    name: &'static str,
    help: &'static str,
    get: Getter,
    set: Setter,
}

fn parse<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| e.to_string())
}

macro_rules! key {
    ($name:literal, $help:literal, $($field:ident).+) => {
        Key {
            name: $name,
            help: $help,
            get: |c| c.$($field).+.to_string(),
            set: |c, v| {
                c.$($field).+ = parse(v)?;
                Ok(())
            },
        }
    };
}

#[rustfmt::skip]
const KEYS: &[Key] = &[
    key!("channel", "gray level source for color input: luma, red, green or raw", channel),
    key!("threads", "worker threads for batch commands, 0 = one per core", threads),
    key!("locator.initial_fraction", "share of brightest field-of-view pixels in the first candidate pass", disk.locator.initial_fraction),
    key!("locator.fraction_step", "increase of that share per retry", disk.locator.fraction_step),
    key!("locator.max_fraction", "largest share tried", disk.locator.max_fraction),
    key!("locator.circularity_min", "minimum 4*pi*area/perimeter^2 of a candidate", disk.locator.circularity_min),
    key!("locator.min_region_area", "minimum candidate area, pixels", disk.locator.min_region_area),
    key!("locator.vessel_width_min", "average vessel width a candidate window must reach, pixels", disk.locator.vessel_width_min),
    key!("locator.analysis_window", "side of the vessel window around each candidate, pixels", disk.locator.analysis_window),
    key!("locator.fov_margin", "field of view = pixels brighter than the image minimum by more than this", disk.locator.fov_margin),
    key!("locator.candidate_opening", "opening radius applied to the bright mask before labeling, 0 = off", disk.locator.candidate_opening),
    key!("vessels.window_size", "side of the Radon windows, pixels (>= 15)", disk.vessels.window_size),
    key!("vessels.stride", "step between Radon windows, pixels", disk.vessels.stride),
    key!("vessels.angle_bins", "Radon angles over [0, 180) degrees", disk.vessels.angle_bins),
    key!("vessels.radon_confidence", "peak-to-median Radon ratio needed to trust a window", disk.vessels.radon_confidence),
    key!("vessels.edge_threshold_factor", "edge threshold as a multiple of the window's median |gradient|", disk.vessels.edge_threshold_factor),
    key!("vessels.min_edge_response", "absolute edge threshold floor, Sobel units", disk.vessels.min_edge_response),
    key!("vessels.max_pair_distance", "largest distance between paired vessel edges, pixels", disk.vessels.max_pair_distance),
    key!("vessels.min_pair_symmetry", "weaker over stronger edge response of a pair, at least", disk.vessels.min_pair_symmetry),
    key!("vessels.reconstruct_band", "how far reconstruction may grow around validated vessel pixels", disk.vessels.reconstruct_band),
    key!("segmenter.diameter_ratio_max", "rectangle height over width", disk.segmenter.diameter_ratio_max),
    key!("segmenter.scan_halfwidth", "initial rim scan half-width, pixels at the reference width", disk.segmenter.scan_halfwidth),
    key!("segmenter.enlargement_factor", "scan growth per retry", disk.segmenter.enlargement_factor),
    key!("segmenter.max_enlargements", "scan retries", disk.segmenter.max_enlargements),
    key!("segmenter.grad_min_factor", "rim gradient must reach this multiple of the scan line's median |gx|", disk.segmenter.grad_min_factor),
    key!("segmenter.grad_min_peak_fraction", "and this fraction of its strongest non-vessel |gx|", disk.segmenter.grad_min_peak_fraction),
    key!("segmenter.diameter_min", "smallest plausible disk width, pixels at the reference width", disk.segmenter.diameter_min),
    key!("segmenter.diameter_max", "largest plausible disk width, pixels at the reference width", disk.segmenter.diameter_max),
    key!("segmenter.reference_width", "image width the pixel sizes above refer to", disk.segmenter.reference_width),
    key!("segmenter.vertical_tolerance_deg", "vessel directions this close to vertical vote for the split", disk.segmenter.vertical_tolerance_deg),
    key!("segmenter.split_search_fraction", "central share of the rectangle searched for the split", disk.segmenter.split_search_fraction),
    key!("segmenter.dual_threshold", "threshold the two halves separately (false = one threshold)", disk.segmenter.dual_threshold),
    key!("segmenter.closing_radius", "closing radius applied to the thresholded disk", disk.segmenter.closing_radius),
    key!("segmenter.analysis_window", "window used to move the center onto the vessels, pixels", disk.segmenter.analysis_window),
    key!("segmenter.vertical_recenter", "rescan the rim through the disk's mid-height", disk.segmenter.vertical_recenter),
];

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = PipelineConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax { line, text: raw.trim().to_string() });
            };
            let (key, value) = (key.trim(), value.trim());
            let entry = KEYS
                .iter()
                .find(|k| k.name == key)
                .ok_or_else(|| ConfigError::UnknownKey { line, key: key.to_string() })?;
            (entry.set)(&mut cfg, value).map_err(|reason| ConfigError::BadValue {
                line,
                key: key.to_string(),
                value: value.to_string(),
                reason,
            })?;
        }
        cfg.disk.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Read { path: path.display().to_string(), reason: e.to_string() })?;
        Self::parse(&text)
    }

    /// The configuration as a commented config file; parsing it back gives
    /// the same configuration.
    pub fn render(&self) -> String {
        let mut out = String::from("# discseg configuration\n");
        for k in KEYS {
            let _ = writeln!(out, "\n# {}\n{} = {}", k.help, k.name, (k.get)(self));
        }
        out
    }

    pub fn keys() -> impl Iterator<Item = &'static str> {
        KEYS.iter().map(|k| k.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = PipelineConfig::default();
        assert_eq!(PipelineConfig::parse(&cfg.render()).unwrap(), cfg);
    }

    #[test]
    fn overrides_and_comments() {
        let text = "# tuned\nlocator.initial_fraction = 0.15  # a bit more\n\nchannel=luma\nsegmenter.dual_threshold = false\n";
        let cfg = PipelineConfig::parse(text).unwrap();
        assert_eq!(cfg.disk.locator.initial_fraction, 0.15);
        assert_eq!(cfg.channel, ChannelMode::Luma);
        assert!(!cfg.disk.segmenter.dual_threshold);
        assert_eq!(PipelineConfig::parse(&cfg.render()).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = PipelineConfig::parse("locator.initial_fraction = 0.1\nlocator.bogus = 3\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { line: 2, key: "locator.bogus".into() });
        assert!(err.to_string().contains("locator.bogus"));
    }

    #[test]
    fn bad_values_and_syntax() {
        assert!(matches!(PipelineConfig::parse("threads = many"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(PipelineConfig::parse("channel = blue"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(PipelineConfig::parse("just words"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(PipelineConfig::parse("locator.max_fraction = 0.05"), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn every_default_documented() {
        let text = PipelineConfig::default().render();
        for key in PipelineConfig::keys() {
            assert!(text.contains(&format!("\n{key} = ")), "{key}");
        }
        assert!(text.contains("locator.initial_fraction = 0.13"));
        assert!(text.contains("locator.analysis_window = 70"));
        assert!(text.contains("segmenter.diameter_ratio_max = 1.2"));
    }
}
