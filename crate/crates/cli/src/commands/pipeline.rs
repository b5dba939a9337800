use std::path::PathBuf;

use anyhow::{Context, Result};
use floorgrid::density::normalize_density;
use floorgrid::io::pgm::{density_preview, write_pgm, PgmFormat};
use floorgrid::io::sidecar::PartitionSidecar;
use floorgrid::labeling::{default_class_names, pixel_accuracy, vote_labels, LabelMap};
use floorgrid::metrics::{boundary_f, iou, BoundaryMode, BoundaryScore};
use floorgrid::partition::{misalignment, partition_stats, Misalignment, PartitionStats};
use floorgrid::pipeline::PlanAnalysis;
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::{files, svg, InputError};

#[derive(Debug, clap::Args)]
pub struct PipelineArgs {
    /// Floorplan JSON.
    pub plan: PathBuf,
    /// Ground-truth labels (FGRD i32) on the same raster; defaults to the plan's rooms.
    #[arg(long)]
    pub gt: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct VizArgs {
    /// Floorplan JSON.
    pub plan: PathBuf,
}

#[derive(Debug, Serialize)]
struct LabelMetrics {
    mean_iou: f64,
    per_class_iou: Vec<Option<f64>>,
    pixel_accuracy: f64,
    tol_px: usize,
    boundary_all: BoundaryScore,
    boundary_internal: BoundaryScore,
}

#[derive(Debug, Serialize)]
struct PipelineMetrics {
    plan: String,
    strategy: String,
    resolution: usize,
    meters_per_pixel: f64,
    interior_pixels: usize,
    density_regions: usize,
    distinct_density_values: usize,
    region_count: usize,
    stats: PartitionStats,
    misalignment: Misalignment,
    labels: Option<LabelMetrics>,
}

pub fn run(cfg: &PipelineConfig, args: &PipelineArgs) -> Result<()> {
    let plan = files::load_plan(&args.plan)?;
    let strategy = cfg.strategies()?[0];
    let analysis = PlanAnalysis::new(&plan, &cfg.raster_options())
        .with_context(|| format!("density stage for {}", args.plan.display()))?;
    let out = &cfg.out;
    files::create_dir(out)?;

    let mask = &analysis.raster.mask;
    files::write_grid(&out.join("mask.fgrd"), &mask.cells)?;
    let mut pgm = Vec::new();
    write_pgm(
        &mut pgm,
        &mask.cells.map(|&c| c.saturating_mul(51)),
        PgmFormat::Raw,
    )?;
    std::fs::write(out.join("mask.pgm"), pgm).context("writing mask.pgm")?;

    let density = &analysis.density;
    let normalized = normalize_density(density);
    files::write_grid(&out.join("density_raw.fgrd"), &density.raw_sums)?;
    files::write_grid(&out.join("density.fgrd"), &density.values)?;
    files::write_grid(&out.join("density_normalized.fgrd"), &normalized.values)?;
    let mut pgm = Vec::new();
    write_pgm(&mut pgm, &density_preview(density), PgmFormat::Raw)?;
    std::fs::write(out.join("density.pgm"), pgm).context("writing density.pgm")?;

    let partition = analysis.partition(&strategy);
    files::write_grid(&out.join("partition.fgrd"), &partition.region_id_grid)?;
    files::write_text(
        &out.join("partition.json"),
        &(PartitionSidecar::of(&partition).to_json() + "\n"),
    )?;

    let classes = default_class_names();
    let gt = match &args.gt {
        Some(path) => {
            let labels = files::read_grid::<i32>(path)?;
            if !labels.same_shape(&mask.cells) {
                return Err(InputError(format!(
                    "{}: labels are {}x{}, raster is {}x{}",
                    path.display(),
                    labels.width(),
                    labels.height(),
                    mask.width(),
                    mask.height()
                ))
                .into());
            }
            Some(LabelMap::new(labels, classes.clone()))
        }
        None => plan
            .gt_rooms
            .is_some()
            .then(|| analysis.gt_labels(&plan, &classes)),
    };

    let mut voted = None;
    let labels = match &gt {
        Some(gt) => {
            let (_, expanded) = vote_labels(&partition, gt).context("voting stage")?;
            files::write_grid(&out.join("labels.fgrd"), &expanded.labels)?;
            let report = iou(&expanded, gt, classes.len())?;
            let metrics = LabelMetrics {
                mean_iou: report.mean,
                per_class_iou: report.per_class,
                pixel_accuracy: pixel_accuracy(&expanded, gt)? * 100.0,
                tol_px: cfg.tol_px,
                boundary_all: boundary_f(&expanded, gt, cfg.tol_px, BoundaryMode::All, mask)?,
                boundary_internal: boundary_f(
                    &expanded,
                    gt,
                    cfg.tol_px,
                    BoundaryMode::Internal,
                    mask,
                )?,
            };
            voted = Some(expanded);
            Some(metrics)
        }
        None => None,
    };

    let metrics = PipelineMetrics {
        plan: files::display_name(&args.plan),
        strategy: strategy.to_string(),
        resolution: cfg.resolution,
        meters_per_pixel: analysis.meters_per_pixel(),
        interior_pixels: mask.interior_count(),
        density_regions: analysis.regions.len(),
        distinct_density_values: density.distinct_keys().len(),
        region_count: partition.len(),
        stats: partition_stats(&partition),
        misalignment: misalignment(&partition, &analysis.regions)?,
        labels,
    };
    files::write_json(&out.join("metrics.json"), &metrics)?;

    let figure = svg::overlay(
        &plan,
        &analysis.raster.transform,
        density,
        &normalized,
        &partition,
        voted.as_ref(),
    );
    files::write_text(&out.join("overlay.svg"), &figure)?;
    println!(
        "{}: {} density regions, {} unit regions ({strategy})",
        metrics.plan, metrics.density_regions, metrics.region_count
    );
    Ok(())
}

pub fn viz(cfg: &PipelineConfig, args: &VizArgs) -> Result<()> {
    let plan = files::load_plan(&args.plan)?;
    let strategy = cfg.strategies()?[0];
    let analysis = PlanAnalysis::new(&plan, &cfg.raster_options())?;
    let partition = analysis.partition(&strategy);
    let labels = match plan.gt_rooms {
        Some(_) => Some(
            vote_labels(
                &partition,
                &analysis.gt_labels(&plan, &default_class_names()),
            )?
            .1,
        ),
        None => None,
    };
    let normalized = normalize_density(&analysis.density);
    let figure = svg::overlay(
        &plan,
        &analysis.raster.transform,
        &analysis.density,
        &normalized,
        &partition,
        labels.as_ref(),
    );
    files::create_dir(&cfg.out)?;
    let stem = args
        .plan
        .file_stem()
        .map_or_else(|| "plan".into(), |s| s.to_string_lossy().into_owned());
    let path = cfg.out.join(format!("{stem}.svg"));
    files::write_text(&path, &figure)?;
    println!("wrote {}", path.display());
    Ok(())
}
