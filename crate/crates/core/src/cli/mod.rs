//! Manifest-driven batch front end of the `mcn` binary.
//!
//! Exit codes: 0 on success, 2 when some rows failed but outputs were
//! written, 1 on a hard failure.

mod commands;
mod manifest;
mod output;

pub use commands::{cmd_analyze, cmd_calibrate, cmd_map, cmd_model, cmd_synth, pump_file_name, shot_file_name, Ctx, Outcome};
pub use manifest::{
    AnalyzeBlock, BetaBlock, CalibrateBlock, DetectBlock, DriveBlock, GeometryBlock, LoadedManifest, ManifestError, MapBlock,
    ModelBlock, RunManifest, SpeciesBlock, SynthBlock, ToleranceBlock,
};
pub use output::{fmt_f64, render_json, write_atomic, Provenance, Table, TOOL_VERSION};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "mcn", version, about = "Maximum-cooperation-number model, burst analysis and calibration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Verb,
    /// Run manifest (JSON).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Output directory; overrides the manifest's `output_dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed; overrides the manifest's `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Verb {
    /// Evaluate the MCN breakdown for every (drive, N).
    Model,
    /// Extract burst features from a directory of shot traces.
    Analyze,
    /// Generate synthetic pump and shot traces.
    Synth,
    /// Fit β per detuning and the β(Δp) law.
    Calibrate,
    /// Relative-MCN map with boundary curves.
    Map,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    Partial,
    Failure,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Partial => 2,
            Status::Failure => 1,
        }
    }
}

pub fn execute(cli: &Cli) -> anyhow::Result<Outcome> {
    let path = cli.manifest.as_ref().ok_or_else(|| anyhow::anyhow!("--manifest <path> is required"))?;
    let loaded = LoadedManifest::from_path(path)?;
    let out_dir = match &cli.out {
        Some(o) => o.clone(),
        None => loaded.resolve(&loaded.manifest.output_dir),
    };
    let ctx = Ctx { seed: cli.seed.unwrap_or(loaded.manifest.seed), prov: Provenance::new(&loaded.sha256), out_dir, loaded: &loaded };
    let run = || match cli.command {
        Verb::Model => cmd_model(&ctx),
        Verb::Analyze => cmd_analyze(&ctx),
        Verb::Synth => cmd_synth(&ctx),
        Verb::Calibrate => cmd_calibrate(&ctx),
        Verb::Map => cmd_map(&ctx),
    };
    match cli.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build()?.install(run),
        None => run(),
    }
}

/// Parses arguments, runs the verb, reports to stderr and returns the status.
pub fn run_from_args<I, T>(args: I) -> Status
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::Failure } else { Status::Success };
        }
    };
    match execute(&cli) {
        Ok(o) => {
            for f in &o.files {
                eprintln!("wrote {}", f.display());
            }
            if o.row_failures > 0 {
                eprintln!("{} row(s) failed", o.row_failures);
                Status::Partial
            } else {
                Status::Success
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            Status::Failure
        }
    }
}
