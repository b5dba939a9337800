//! JSON metadata stored next to a partition's FGRD id grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::partition::{SplitStrategy, UnitRegion, UnitRegionPartition};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionSidecar {
    pub width: usize,
    pub height: usize,
    pub meters_per_pixel: f64,
    pub strategy: Option<SplitStrategy>,
    pub region_count: usize,
    pub regions: Vec<UnitRegion>,
}

impl PartitionSidecar {
    pub fn of(p: &UnitRegionPartition) -> Self {
        Self {
            width: p.width(),
            height: p.height(),
            meters_per_pixel: p.meters_per_pixel,
            strategy: p.strategy,
            region_count: p.len(),
            regions: p.regions.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sidecar serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("partition sidecar: {e}")))
    }

    /// Joins the sidecar with its id grid.
    pub fn into_partition(self, ids: Grid<i32>) -> Result<UnitRegionPartition> {
        if ids.width() != self.width || ids.height() != self.height {
            return Err(Error::ShapeMismatch(
                "sidecar and id grid disagree on size".into(),
            ));
        }
        if self.regions.len() != self.region_count {
            return Err(Error::Parse("sidecar region count mismatch".into()));
        }
        UnitRegionPartition::from_parts(ids, self.regions, self.strategy, self.meters_per_pixel)
    }
}
