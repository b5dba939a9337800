//! Plan → raster → density → density regions, shared by the report and CLI.

use crate::density::{density_map, DensityMap};
use crate::error::Result;
use crate::floorplan::Floorplan;
use crate::labeling::LabelMap;
use crate::partition::{
    cluster_density_regions, merge_sloping, split_unit_regions, DensityRegions, SplitStrategy,
    UnitRegionPartition,
};
use crate::raster::{rasterize, rasterize_rooms, Raster, RasterOptions};

#[derive(Clone, Debug)]
pub struct PlanAnalysis {
    pub raster: Raster,
    pub density: DensityMap,
    /// Density regions after sloping-wall merging.
    pub regions: DensityRegions,
}

impl PlanAnalysis {
    pub fn new(plan: &Floorplan, opts: &RasterOptions) -> Result<Self> {
        let raster = rasterize(plan, opts)?;
        let density = density_map(&raster.mask)?;
        let clusters = cluster_density_regions(&density)?;
        let regions = merge_sloping(&clusters, plan, &raster.transform);
        Ok(Self {
            raster,
            density,
            regions,
        })
    }

    pub fn meters_per_pixel(&self) -> f64 {
        self.raster.transform.meters_per_pixel
    }

    pub fn partition(&self, strategy: &SplitStrategy) -> UnitRegionPartition {
        split_unit_regions(&self.regions, strategy, self.meters_per_pixel())
    }

    /// Ground-truth room labels on this raster.
    pub fn gt_labels(&self, plan: &Floorplan, class_names: &[String]) -> LabelMap {
        rasterize_rooms(plan, &self.raster, class_names)
    }
}
