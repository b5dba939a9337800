use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use crate::commands;
use crate::config::{Overrides, PipelineConfig};

#[derive(Debug, Parser)]
#[command(
    name = "floorgrid",
    version,
    about = "Floorplan density maps and unit-region partitions"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct GlobalArgs {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Raster side length in pixels.
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Splitting strategy `MxN:h` (h in meters); repeatable.
    #[arg(long = "strategy", global = true)]
    pub strategies: Vec<String>,
    /// Boundary matching tolerance in pixels.
    #[arg(long, global = true)]
    pub tol_px: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for batch commands (default: $FLOORGRID_JOBS or 1).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate random plans with density-aligned ground-truth rooms.
    Synth(commands::synth::SynthArgs),
    /// Run one plan through rasterization, density, partition and voting.
    Pipeline(commands::pipeline::PipelineArgs),
    /// Correlation table of partitions against ground truth over a corpus.
    Report(commands::report::ReportArgs),
    /// Max-pooled plan embeddings from region features.
    Embed(commands::encode::EmbedArgs),
    /// Group unit regions into room instances.
    Group(commands::encode::GroupArgs),
    /// Density and partition overlay as SVG.
    Viz(commands::pipeline::VizArgs),
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            config: self.config.clone(),
            resolution: self.resolution,
            strategies: self.strategies.clone(),
            tol_px: self.tol_px,
            seed: self.seed,
            jobs: self.jobs,
            out: self.out.clone(),
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = PipelineConfig::resolve(&cli.global.overrides())?;
    match &cli.command {
        Command::Synth(args) => commands::synth::run(&cfg, args),
        Command::Pipeline(args) => commands::pipeline::run(&cfg, args),
        Command::Report(args) => commands::report::run(&cfg, args),
        Command::Embed(args) => commands::encode::embed(&cfg, args),
        Command::Group(args) => commands::encode::group(&cfg, args),
        Command::Viz(args) => commands::pipeline::viz(&cfg, args),
    }
}
