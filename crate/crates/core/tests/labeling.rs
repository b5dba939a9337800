use floorgrid::density::density_map;
use floorgrid::grid::Grid;
use floorgrid::labeling::{
    default_class_names, expand_labels, modal_label, perturb_labels, pixel_accuracy, vote_labels,
    LabelMap, RegionLabels,
};
use floorgrid::metrics::{boundary_f, iou, BoundaryMode};
use floorgrid::partition::{
    cluster_density_regions, refine, split_unit_regions, uniform_partition, SplitStrategy,
};
use floorgrid::raster::{rasterize, RasterMask, RasterOptions};
use floorgrid::synth::synth_floorplan;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("c{i}")).collect()
}

fn map(w: usize, h: usize, f: impl FnMut(usize, usize) -> i32) -> LabelMap {
    LabelMap::new(Grid::from_fn(w, h, f), names(3))
}

/// Random blocky labels on the interior, -1 elsewhere.
fn random_gt(mask: &RasterMask, rng: &mut ChaCha8Rng, classes: i32) -> LabelMap {
    let block = rng.random_range(1..12);
    let table: Vec<i32> = (0..4096).map(|_| rng.random_range(0..classes)).collect();
    let grid = Grid::from_fn(mask.width(), mask.height(), |x, y| {
        if mask.is_interior(x, y) {
            table[((y / block) * 64 + x / block) % table.len()]
        } else {
            -1
        }
    });
    LabelMap::new(grid, names(classes as usize))
}

#[test]
fn voting_examples() {
    assert_eq!(modal_label([0, 0, 0, 0, 0, 0, 1, 1, 1, 1]), 0);
    assert_eq!(modal_label([4, 2, 4, 2, 4, 2, 4, 2, 4, 2]), 2);
    assert_eq!(modal_label([-1, -1]), -1);

    let mask = RasterMask::from_fn(10, 10, |_, _| true);
    let p = uniform_partition(&mask, 4, 0.1).unwrap();
    let gt = map(10, 10, |_, _| 2);
    let (labels, expanded) = vote_labels(&p, &gt).unwrap();
    assert!(labels.0.iter().all(|&l| l == 2));
    assert_eq!(expanded, gt);
}

#[test]
fn half_overlap_iou() {
    let gt = map(40, 20, |x, _| if (0..20).contains(&x) { 1 } else { 0 });
    let pred = map(40, 20, |x, _| if (10..30).contains(&x) { 1 } else { 0 });
    let r = iou(&pred, &gt, 2).unwrap();
    assert!((r.per_class[1].unwrap() - 100.0 / 3.0).abs() < 0.01);
    assert_eq!(iou(&gt, &gt, 2).unwrap().mean, 100.0);
}

#[test]
fn boundary_f_fixtures() {
    let outline = RasterMask::from_fn(40, 40, |x, y| (2..38).contains(&x) && (2..38).contains(&y));
    let split = |at: usize| {
        map(40, 40, |x, y| {
            if !outline.is_interior(x, y) {
                -1
            } else if x < at {
                0
            } else {
                1
            }
        })
    };
    let gt = split(20);
    let shifted = split(22);
    for mode in [BoundaryMode::All, BoundaryMode::Internal] {
        assert_eq!(boundary_f(&gt, &gt, 1, mode, &outline).unwrap().f, 1.0);
    }
    assert_eq!(
        boundary_f(&shifted, &gt, 1, BoundaryMode::Internal, &outline)
            .unwrap()
            .f,
        0.0
    );
    assert_eq!(
        boundary_f(&shifted, &gt, 2, BoundaryMode::Internal, &outline)
            .unwrap()
            .f,
        1.0
    );
}

#[test]
fn perturbation_shifts_borders() {
    let gt = map(10, 10, |x, _| if x < 5 { 0 } else { 1 });
    let moved = perturb_labels(&gt, 2);
    assert_eq!(*moved.labels.get(6, 5), 0);
    assert_eq!(*moved.labels.get(7, 5), 1);
    assert_eq!(*moved.labels.get(6, 1), 1);
    assert_eq!(perturb_labels(&gt, 0), gt);
}

fn plan_setup(seed: u64) -> (RasterMask, floorgrid::partition::DensityRegions, f64) {
    let plan = synth_floorplan(seed, 5, 64);
    let r = rasterize(
        &plan,
        &RasterOptions {
            resolution: 96,
            ..RasterOptions::default()
        },
    )
    .unwrap();
    let regions = cluster_density_regions(&density_map(&r.mask).unwrap()).unwrap();
    (r.mask, regions, r.transform.meters_per_pixel)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn voting_maximizes_accuracy(seed in 0u64..100_000, m in 1u32..6, classes in 1i32..6) {
        let (mask, regions, mpp) = plan_setup(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gt = random_gt(&mask, &mut rng, classes);
        let p = split_unit_regions(&regions, &SplitStrategy::new(m, m, 0.2).unwrap(), mpp);
        let (labels, _) = vote_labels(&p, &gt).unwrap();
        for (r, &chosen) in p.regions.iter().zip(&labels.0) {
            let mut counts = vec![0usize; classes as usize];
            for &(x, y) in &r.pixels {
                counts[*gt.labels.get(x, y) as usize] += 1;
            }
            let best = *counts.iter().max().unwrap();
            prop_assert_eq!(counts[chosen as usize], best);
            prop_assert_eq!(counts.iter().position(|&c| c == best).unwrap() as i32, chosen);
        }
    }

    #[test]
    fn refinement_never_hurts(seed in 0u64..100_000, m in 1u32..5, factor in 2u32..4) {
        let (mask, regions, mpp) = plan_setup(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let gt = random_gt(&mask, &mut rng, 4);
        let p = split_unit_regions(&regions, &SplitStrategy::new(m, m, 0.5).unwrap(), mpp);
        let coarse = pixel_accuracy(&vote_labels(&p, &gt).unwrap().1, &gt).unwrap();
        let fine = pixel_accuracy(&vote_labels(&refine(&p, factor), &gt).unwrap().1, &gt).unwrap();
        prop_assert!(fine >= coarse, "{} < {}", fine, coarse);
    }

    #[test]
    fn metrics_are_symmetric_and_bounded(seed in 0u64..100_000, tol in 0usize..3) {
        let (mask, _, _) = plan_setup(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_gt(&mask, &mut rng, 4);
        let b = random_gt(&mask, &mut rng, 4);
        let ab = iou(&a, &b, 4).unwrap();
        let ba = iou(&b, &a, 4).unwrap();
        prop_assert_eq!(&ab, &ba);
        prop_assert!((0.0..=100.0).contains(&ab.mean));
        for mode in [BoundaryMode::All, BoundaryMode::Internal] {
            let fab = boundary_f(&a, &b, tol, mode, &mask).unwrap();
            let fba = boundary_f(&b, &a, tol, mode, &mask).unwrap();
            prop_assert!((fab.f - fba.f).abs() < 1e-12);
            prop_assert_eq!(fab.precision, fba.recall);
            prop_assert!((0.0..=1.0).contains(&fab.f));
        }
    }

    #[test]
    fn expand_inverts_vote_on_constant_regions(seed in 0u64..100_000) {
        let (_, regions, mpp) = plan_setup(seed);
        let p = split_unit_regions(&regions, &SplitStrategy::new(3, 3, 0.3).unwrap(), mpp);
        let labels = RegionLabels((0..p.len()).map(|i| (i % 7) as i32).collect());
        let gt = expand_labels(&p, &labels, &default_class_names());
        let (voted, expanded) = vote_labels(&p, &gt).unwrap();
        prop_assert_eq!(voted, labels);
        prop_assert_eq!(expanded, gt);
    }
}
