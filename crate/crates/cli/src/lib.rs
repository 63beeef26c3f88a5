//! Library side of the `discseg` command: configuration files, image and
//! manifest I/O, batch evaluation and report writing.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod eval;
pub mod io;
pub mod manifest;
pub mod report;

pub use config::PipelineConfig;
