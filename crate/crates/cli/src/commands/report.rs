use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use floorgrid::labeling::{default_class_names, LabelMap};
use floorgrid::report::{correlation_report, CorpusItem, ReportOptions};
use rayon::prelude::*;
use serde::Serialize;

use super::synth::Manifest;
use crate::config::PipelineConfig;
use crate::{files, InputError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum LabelSource {
    /// Rasterize each plan's rooms.
    Rooms,
    /// The corpus' ground-truth label files.
    Gt,
    /// The corpus' perturbed label files.
    Perturbed,
}

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    /// Corpus directory written by `synth`, or any directory of plan JSON files.
    pub corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = LabelSource::Gt)]
    pub labels: LabelSource,
    /// Index of the strategy whose region count the uniform baseline matches
    /// (default: the last).
    #[arg(long)]
    pub uniform_match: Option<usize>,
}

struct Entry {
    name: String,
    plan: PathBuf,
    labels: Option<PathBuf>,
}

fn corpus_entries(dir: &Path, source: LabelSource) -> Result<Vec<Entry>> {
    if dir.join(Manifest::FILE).exists() {
        let manifest = Manifest::load(dir)?;
        return manifest
            .plans
            .into_iter()
            .map(|e| {
                let labels = match source {
                    LabelSource::Rooms => None,
                    LabelSource::Gt => Some(dir.join(&e.gt)),
                    LabelSource::Perturbed => match e.gt_perturbed {
                        Some(p) => Some(dir.join(p)),
                        None => {
                            return Err(InputError(format!(
                                "{} has no perturbed labels; rerun synth with --perturb",
                                dir.display()
                            ))
                            .into())
                        }
                    },
                };
                Ok(Entry {
                    name: e.plan.clone(),
                    plan: dir.join(e.plan),
                    labels,
                })
            })
            .collect();
    }
    if source != LabelSource::Rooms {
        return Err(InputError(format!(
            "{} has no manifest; use --labels rooms",
            dir.display()
        ))
        .into());
    }
    let read = std::fs::read_dir(dir)
        .map_err(|e| InputError(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = read
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json")
                && p.file_name().is_some_and(|n| n != "manifest.json")
        })
        .collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|p| Entry {
            name: files::display_name(&p),
            plan: p,
            labels: None,
        })
        .collect())
}

#[derive(Serialize)]
struct Skipped {
    plan: String,
    error: String,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    strategies: &'a [String],
    resolution: usize,
    plans: usize,
    plans_used: usize,
    rows: &'a [floorgrid::report::ReportRow],
    skipped: Vec<Skipped>,
}

pub fn run(cfg: &PipelineConfig, args: &ReportArgs) -> Result<()> {
    let strategies = cfg.strategies()?;
    let entries = corpus_entries(&args.corpus, args.labels)?;
    if entries.is_empty() {
        return Err(InputError(format!("{} holds no plans", args.corpus.display())).into());
    }
    let pool = cfg.thread_pool()?;
    let loaded: Vec<Result<CorpusItem>> = pool.install(|| {
        entries
            .par_iter()
            .map(|e| {
                let plan = files::load_plan(&e.plan)?;
                let gt = match &e.labels {
                    Some(path) => Some(LabelMap::new(
                        files::read_grid(path)?,
                        default_class_names(),
                    )),
                    None => None,
                };
                Ok(CorpusItem { plan, gt })
            })
            .collect()
    });

    let mut skipped = Vec::new();
    let mut items = Vec::new();
    let mut names = Vec::new();
    for (entry, item) in entries.iter().zip(loaded) {
        match item {
            Ok(item) => {
                items.push(item);
                names.push(entry.name.clone());
            }
            Err(e) => skipped.push(Skipped {
                plan: entry.name.clone(),
                error: format!("{e:#}"),
            }),
        }
    }
    if items.is_empty() {
        bail!(
            "all {} plans failed to load; first error: {}",
            entries.len(),
            skipped[0].error
        );
    }
    let opts = ReportOptions {
        raster: cfg.raster_options(),
        uniform_match: args.uniform_match,
        jobs: cfg.jobs,
    };
    let report = correlation_report(&items, &strategies, &opts)?;
    for (i, error) in &report.skipped {
        skipped.push(Skipped {
            plan: names[*i].clone(),
            error: error.clone(),
        });
    }
    if report.plans_used == 0 {
        bail!(
            "all {} plans failed; first error: {}",
            entries.len(),
            skipped[0].error
        );
    }

    files::create_dir(&cfg.out)?;
    files::write_text(&cfg.out.join("report.csv"), &report.to_csv())?;
    let table = report.to_table();
    files::write_text(&cfg.out.join("report.txt"), &table)?;
    for s in &skipped {
        eprintln!("skipped {}: {}", s.plan, s.error);
    }
    files::write_json(
        &cfg.out.join("report.json"),
        &ReportFile {
            strategies: &cfg.strategies,
            resolution: cfg.resolution,
            plans: entries.len(),
            plans_used: report.plans_used,
            rows: &report.rows,
            skipped,
        },
    )?;
    print!("{table}");
    Ok(())
}
