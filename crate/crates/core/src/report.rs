//! Correlation between unit-region partitions and room segmentations:
//! vote ground truth into regions, expand back, and score against the
//! pixel labels, per splitting strategy.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floorplan::Floorplan;
use crate::labeling::{default_class_names, pixel_accuracy, vote_labels, LabelMap};
use crate::metrics::iou;
use crate::partition::{uniform_partition, SplitStrategy, UnitRegionPartition};
use crate::pipeline::PlanAnalysis;
use crate::raster::RasterOptions;

pub struct CorpusItem {
    pub plan: Floorplan,
    /// Pixel labels on the report raster; rasterized from the plan's rooms when absent.
    pub gt: Option<LabelMap>,
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub raster: RasterOptions,
    /// Strategy whose per-plan region count the uniform baseline matches;
    /// defaults to the last one.
    pub uniform_match: Option<usize>,
    pub jobs: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            raster: RasterOptions::default(),
            uniform_match: None,
            jobs: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RowKind {
    Strategy(SplitStrategy),
    Pixel,
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub kind: RowKind,
    /// Mean over plans of the per-plan mean IoU, percent.
    pub miou: f64,
    /// Mean over plans of pixel accuracy, percent.
    pub pixel_accuracy: f64,
    pub avg_regions: f64,
}

impl ReportRow {
    pub fn name(&self) -> &'static str {
        match self.kind {
            RowKind::Strategy(_) => "Unit Region",
            RowKind::Pixel => "Pixel",
            RowKind::Uniform => "Uniform Partition",
        }
    }

    pub fn grid(&self) -> String {
        match self.kind {
            RowKind::Strategy(s) => s.grid_label(),
            _ => "-".into(),
        }
    }

    pub fn thresh(&self) -> String {
        match self.kind {
            RowKind::Strategy(s) => format!("{}m", s.min_size_m),
            _ => "-".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub miou: f64,
    pub pixel_accuracy: f64,
    pub regions: usize,
}

/// Scores for one plan: one per strategy, then pixel, then uniform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanScores {
    pub strategies: Vec<Score>,
    pub pixel: Score,
    pub uniform: Score,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub rows: Vec<ReportRow>,
    pub plans_used: usize,
    /// `(corpus index, error)` for skipped plans.
    pub skipped: Vec<(usize, String)>,
    pub per_plan: Vec<Option<PlanScores>>,
}

/// Votes `gt` through `p` and scores the expanded map against `gt`.
pub fn score_partition(p: &UnitRegionPartition, gt: &LabelMap) -> Result<Score> {
    let (_, expanded) = vote_labels(p, gt)?;
    Ok(Score {
        miou: iou(&expanded, gt, gt.class_count())?.mean,
        pixel_accuracy: pixel_accuracy(&expanded, gt)? * 100.0,
        regions: p.len(),
    })
}

pub fn score_plan(
    item: &CorpusItem,
    strategies: &[SplitStrategy],
    opts: &ReportOptions,
) -> Result<PlanScores> {
    let analysis = PlanAnalysis::new(&item.plan, &opts.raster)?;
    let gt = match &item.gt {
        Some(gt) => gt.clone(),
        None => analysis.gt_labels(&item.plan, &default_class_names()),
    };
    let strategies: Vec<Score> = strategies
        .iter()
        .map(|s| score_partition(&analysis.partition(s), &gt))
        .collect::<Result<_>>()?;
    let interior = analysis.raster.mask.interior_count();
    let pixel = Score {
        miou: 100.0,
        pixel_accuracy: 100.0,
        regions: interior,
    };
    let match_index = opts
        .uniform_match
        .unwrap_or(strategies.len().saturating_sub(1));
    let target = strategies.get(match_index).map_or(1, |s| s.regions);
    let uniform_p = uniform_partition(&analysis.raster.mask, target, analysis.meters_per_pixel())?;
    let uniform = score_partition(&uniform_p, &gt)?;
    Ok(PlanScores {
        strategies,
        pixel,
        uniform,
    })
}

/// Runs every plan (in parallel over `opts.jobs` threads) and averages in
/// corpus order. Failing plans are skipped and listed.
pub fn correlation_report(
    corpus: &[CorpusItem],
    strategies: &[SplitStrategy],
    opts: &ReportOptions,
) -> Result<CorrelationReport> {
    if corpus.is_empty() {
        return Err(Error::InvalidArgument("empty corpus".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let results: Vec<Result<PlanScores>> = pool.install(|| {
        corpus
            .par_iter()
            .map(|item| score_plan(item, strategies, opts))
            .collect()
    });

    let mut per_plan = Vec::with_capacity(results.len());
    let mut skipped = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => per_plan.push(Some(s)),
            Err(e) => {
                skipped.push((i, e.to_string()));
                per_plan.push(None);
            }
        }
    }
    let used: Vec<&PlanScores> = per_plan.iter().flatten().collect();
    let n = used.len().max(1) as f64;
    let average = |kind: RowKind, pick: &dyn Fn(&PlanScores) -> Score| {
        let (mut miou, mut acc, mut regions) = (0.0, 0.0, 0.0);
        for s in &used {
            let score = pick(s);
            miou += score.miou;
            acc += score.pixel_accuracy;
            regions += score.regions as f64;
        }
        ReportRow {
            kind,
            miou: miou / n,
            pixel_accuracy: acc / n,
            avg_regions: regions / n,
        }
    };
    let mut rows: Vec<ReportRow> = strategies
        .iter()
        .enumerate()
        .map(|(i, s)| average(RowKind::Strategy(*s), &|p| p.strategies[i]))
        .collect();
    rows.push(average(RowKind::Pixel, &|p| p.pixel));
    rows.push(average(RowKind::Uniform, &|p| p.uniform));
    Ok(CorrelationReport {
        rows,
        plans_used: used.len(),
        skipped,
        per_plan,
    })
}

impl CorrelationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("strategy,grid,thresh,miou,pixel_accuracy,avg_num\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.4},{:.4},{:.2}",
                r.name(),
                r.grid(),
                r.thresh(),
                r.miou,
                r.pixel_accuracy,
                r.avg_regions
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<18} {:>6} {:>7} {:>9} {:>9} {:>10}\n",
            "Strategy", "Grid", "Thresh", "IoU", "PixAcc", "Avg. Num"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<18} {:>6} {:>7} {:>9.2} {:>9.2} {:>10.2}",
                r.name(),
                r.grid(),
                r.thresh(),
                r.miou,
                r.pixel_accuracy,
                r.avg_regions
            );
        }
        let _ = writeln!(
            out,
            "plans: {}  skipped: {}",
            self.plans_used,
            self.skipped.len()
        );
        out
    }
}
