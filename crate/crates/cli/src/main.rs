use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use discseg_cli::commands::{locate, segment};
use discseg_cli::dataset::write_phantom_set;
use discseg_cli::eval::evaluate;
use discseg_cli::manifest::read_manifest;
use discseg_cli::report::{format_table, write_csv, Summary};
use discseg_cli::PipelineConfig;
use discseg_core::imgproc::ChannelMode;
use discseg_core::phantom::PhantomConfig;

#[derive(Parser)]
#[command(name = "discseg")]
#[command(version, about = "Optic disk localization and segmentation for retinal fundus images", long_about = None)]
struct Cli {
    /// Configuration file (`key = value` lines; see `discseg config`)
    #[arg(short, long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for batch commands (0 = one per core); overrides the config file
    #[arg(short, long, global = true)]
    threads: Option<usize>,

    /// Gray level source for color images; overrides the config file
    #[arg(long, global = true, value_name = "luma|red|green|raw")]
    channel: Option<ChannelMode>,

    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Print the located disk center of one image
    Locate {
        image: PathBuf,

        /// Print JSON instead of a one-line summary
        #[arg(long)]
        json: bool,
    },

    /// Segment the disk of one image; writes a mask, an overlay and a JSON sidecar
    Segment {
        image: PathBuf,

        /// Output directory
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },

    /// Evaluate against ground truth listed in a CSV manifest (image,gt,fov)
    Eval {
        manifest: PathBuf,

        /// Per-image CSV report; a JSON summary is written next to it
        #[arg(short, long, default_value = "report.csv")]
        output: PathBuf,
    },

    /// Write synthetic fundus images with ground truth and a manifest
    Phantom {
        /// Number of images
        #[arg(short = 'n', long, default_value_t = 20)]
        count: usize,

        #[arg(long, default_value_t = 1)]
        seed: u64,

        /// Output directory
        #[arg(short, long)]
        output: PathBuf,
    },

    /// Print the effective configuration as a commented config file
    Config,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(c) = cli.channel {
        cfg.channel = c;
    }
    Ok(cfg)
}

fn run_eval(manifest: &Path, output: &Path, cfg: &PipelineConfig) -> Result<ExitCode> {
    let entries = read_manifest(manifest)?;
    let run = evaluate(&entries, cfg)?;
    for e in &run.errors {
        eprintln!("error: {}: {}", e.image_id, e.message);
    }
    let Some(report) = run.report else {
        bail!("none of the {} images in {} could be evaluated", entries.len(), manifest.display());
    };

    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(output).with_context(|| format!("creating {}", output.display()))?;
    write_csv(&report.records, BufWriter::new(file)).with_context(|| format!("writing {}", output.display()))?;
    let summary_path = output.with_extension("json");
    let summary = serde_json::to_string_pretty(&Summary::new(&report, &run.errors))?;
    std::fs::write(&summary_path, summary + "\n").with_context(|| format!("writing {}", summary_path.display()))?;

    print!("{}", format_table(&report));
    println!("report: {}  summary: {}", output.display(), summary_path.display());
    if run.errors.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} of {} images failed", run.errors.len(), entries.len());
        Ok(ExitCode::from(2))
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = load_config(&cli)?;
    match cli.command {
        Commands::Locate { image, json } => {
            let out = locate(&image, &cfg)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                println!("{}", out.line());
            }
        }
        Commands::Segment { image, output } => {
            let out = segment(&image, &output, &cfg)?;
            println!(
                "{}: disk rows {}..{} cols {}..{}, {} px, split at col {}{}",
                image.display(),
                out.rect.top,
                out.rect.bottom,
                out.rect.left,
                out.rect.right,
                out.area,
                out.split_col,
                if out.low_confidence { " (low confidence)" } else { "" }
            );
            println!("mask: {}  overlay: {}", out.mask_path.display(), out.overlay_path.display());
        }
        Commands::Eval { manifest, output } => return run_eval(&manifest, &output, &cfg),
        Commands::Phantom { count, seed, output } => {
            if count == 0 {
                bail!("--count must be at least 1");
            }
            let path = write_phantom_set(&output, count, seed, &PhantomConfig::default())?;
            println!("wrote {count} phantoms, manifest: {}", path.display());
        }
        Commands::Config => print!("{}", cfg.render()),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
