use std::path::Path;

use anyhow::{bail, Context, Result};
use floorgrid::labeling::{default_class_names, perturb_labels};
use floorgrid::raster::{rasterize, rasterize_rooms};
use floorgrid::synth::synth_floorplan;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::files;

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    /// Number of plans; seeds run from --seed upward.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Squeeze operations per plan.
    #[arg(long, default_value_t = 4)]
    pub n_ops: usize,
    /// Base square side in plan pixels.
    #[arg(long, default_value_t = 64)]
    pub size: u32,
    /// Also write ground truth with room borders shifted by this many raster pixels.
    #[arg(long)]
    pub perturb: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub seed: u64,
    pub plan: String,
    pub gt: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_perturbed: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub resolution: usize,
    pub n_ops: usize,
    pub size: u32,
    pub perturb: Option<usize>,
    pub classes: Vec<String>,
    pub plans: Vec<ManifestEntry>,
}

impl Manifest {
    pub const FILE: &'static str = "manifest.json";

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(Self::FILE);
        let text = files::read_input(&path)?;
        serde_json::from_str(&text).with_context(|| format!("{}", path.display()))
    }
}

fn synth_one(cfg: &PipelineConfig, args: &SynthArgs, seed: u64) -> Result<ManifestEntry> {
    let plan = synth_floorplan(seed, args.n_ops, args.size);
    let violations = plan.validate();
    if !violations.is_empty() {
        bail!("seed {seed} produced an invalid plan: {violations:?}");
    }
    let raster = rasterize(&plan, &cfg.raster_options())
        .with_context(|| format!("rasterizing seed {seed}"))?;
    let gt = rasterize_rooms(&plan, &raster, &default_class_names());

    let entry = ManifestEntry {
        seed,
        plan: format!("plan_{seed}.json"),
        gt: format!("gt_{seed}.fgrd"),
        gt_perturbed: args.perturb.map(|_| format!("gt_perturbed_{seed}.fgrd")),
    };
    let mut json = plan.to_json();
    json.push('\n');
    files::write_text(&cfg.out.join(&entry.plan), &json)?;
    files::write_grid(&cfg.out.join(&entry.gt), &gt.labels)?;
    if let (Some(k), Some(name)) = (args.perturb, &entry.gt_perturbed) {
        files::write_grid(&cfg.out.join(name), &perturb_labels(&gt, k).labels)?;
    }
    Ok(entry)
}

pub fn run(cfg: &PipelineConfig, args: &SynthArgs) -> Result<()> {
    files::create_dir(&cfg.out)?;
    let seeds: Vec<u64> = (0..args.count).map(|i| cfg.seed + i).collect();
    let plans = cfg.thread_pool()?.install(|| {
        seeds
            .par_iter()
            .map(|&seed| synth_one(cfg, args, seed))
            .collect::<Result<Vec<_>>>()
    })?;
    let manifest = Manifest {
        resolution: cfg.resolution,
        n_ops: args.n_ops,
        size: args.size,
        perturb: args.perturb,
        classes: default_class_names(),
        plans,
    };
    files::write_json(&cfg.out.join(Manifest::FILE), &manifest)?;
    println!(
        "wrote {} plans to {}",
        manifest.plans.len(),
        cfg.out.display()
    );
    Ok(())
}
