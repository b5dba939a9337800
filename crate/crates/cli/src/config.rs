use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use floorgrid::partition::SplitStrategy;
use floorgrid::raster::RasterOptions;
use serde::{Deserialize, Serialize};

use crate::InputError;

pub const JOBS_ENV: &str = "FLOORGRID_JOBS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// Ties between equally frequent classes go to the lowest class id.
    #[default]
    LowestId,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub resolution: usize,
    /// Splitting strategies as `MxN:h`.
    pub strategies: Vec<String>,
    pub tie_rule: TieRule,
    pub tol_px: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            resolution: 256,
            strategies: vec!["1x1:1".into(), "8x8:1".into()],
            tie_rule: TieRule::LowestId,
            tol_px: 1,
            seed: 0,
            out: PathBuf::from("out"),
            jobs: 1,
        }
    }
}

/// Values given on the command line; `None` keeps the lower layer's value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub resolution: Option<usize>,
    pub strategies: Vec<String>,
    pub tol_px: Option<usize>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(Self::read_file(path)?.0)
    }

    /// The parsed file and whether it sets `jobs` itself.
    fn read_file(path: &Path) -> Result<(Self, bool)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("cannot read config {}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("config {}", path.display()))?;
        let sets_jobs = value.get("jobs").is_some();
        let cfg =
            serde_json::from_value(value).with_context(|| format!("config {}", path.display()))?;
        Ok((cfg, sets_jobs))
    }

    /// Layers built-in defaults, `FLOORGRID_JOBS`, the config file and flags,
    /// later layers winning.
    pub fn resolve(o: &Overrides) -> Result<Self> {
        let (mut cfg, file_sets_jobs) = match &o.config {
            Some(path) => Self::read_file(path)?,
            None => (Self::default(), false),
        };
        if !file_sets_jobs {
            if let Ok(v) = std::env::var(JOBS_ENV) {
                cfg.jobs = v.trim().parse().map_err(|_| {
                    InputError(format!("{JOBS_ENV}={v:?} is not a positive integer"))
                })?;
            }
        }
        if let Some(v) = o.resolution {
            cfg.resolution = v;
        }
        if !o.strategies.is_empty() {
            cfg.strategies = o.strategies.clone();
        }
        if let Some(v) = o.tol_px {
            cfg.tol_px = v;
        }
        if let Some(v) = o.seed {
            cfg.seed = v;
        }
        if let Some(v) = o.jobs {
            cfg.jobs = v;
        }
        if let Some(v) = &o.out {
            cfg.out = v.clone();
        }
        cfg.validate().map_err(|e| InputError(e.to_string()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.resolution >= 16,
            "resolution must be at least 16, got {}",
            self.resolution
        );
        ensure!(self.jobs >= 1, "jobs must be at least 1");
        ensure!(
            !self.strategies.is_empty(),
            "at least one strategy is required"
        );
        self.strategies()?;
        Ok(())
    }

    pub fn strategies(&self) -> Result<Vec<SplitStrategy>> {
        self.strategies
            .iter()
            .map(|s| {
                s.parse::<SplitStrategy>()
                    .map_err(|e| InputError(e.to_string()).into())
            })
            .collect()
    }

    pub fn raster_options(&self) -> RasterOptions {
        RasterOptions {
            resolution: self.resolution,
            ..RasterOptions::default()
        }
    }

    pub fn thread_pool(&self) -> Result<rayon::ThreadPool> {
        Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()?)
    }
}
