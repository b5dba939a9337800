mod common;

use floorgrid::density::density_map;
use floorgrid::encoding::{
    embed, geometric_features, group_instances, pairwise_distance, region_pool, triplet_accuracy,
    DenseFeatureMap, Embedding, Reducer, RegionFeatures,
};
use floorgrid::partition::{
    cluster_density_regions, refine, split_unit_regions, SplitStrategy, UnitRegionPartition,
};
use floorgrid::raster::{rasterize, RasterOptions};
use floorgrid::synth::synth_floorplan;
use floorgrid::Error;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{euclid, oracle_pool_mean};

fn rows(data: Vec<Vec<f64>>) -> RegionFeatures {
    RegionFeatures::from_rows(&data).unwrap()
}

fn setup(seed: u64, m: u32) -> (UnitRegionPartition, DenseFeatureMap) {
    let plan = synth_floorplan(seed, 4, 64);
    let r = rasterize(
        &plan,
        &RasterOptions {
            resolution: 80,
            ..RasterOptions::default()
        },
    )
    .unwrap();
    let regions = cluster_density_regions(&density_map(&r.mask).unwrap()).unwrap();
    let p = split_unit_regions(
        &regions,
        &SplitStrategy::new(m, m, 0.2).unwrap(),
        r.transform.meters_per_pixel,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let channels = 3;
    let data = (0..80 * 80 * channels)
        .map(|_| rng.random_range(-4.0f32..4.0))
        .collect();
    (p, DenseFeatureMap::new(80, 80, channels, data).unwrap())
}

#[test]
fn single_region_embedding_is_its_row() {
    let r = rows(vec![vec![0.5, -2.0, 7.0]]);
    assert_eq!(embed(&r).unwrap(), Embedding(vec![0.5, -2.0, 7.0]));
    assert!(matches!(embed(&rows(vec![])), Err(Error::EmptyFeatureSet)));
}

#[test]
fn separable_triplets() {
    // Two families of plans whose region features live in disjoint boxes.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut family = |center: f64| {
        let n = rng.random_range(1..6);
        let mut data: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                vec![
                    center + rng.random_range(-0.5..0.5),
                    center + rng.random_range(-0.5..0.5),
                ]
            })
            .collect();
        data.push(vec![center + 0.5, center + 0.5]);
        embed(&rows(data)).unwrap()
    };
    let (mut a, mut p, mut n) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..50 {
        let (c, other) = if i % 2 == 0 { (0.0, 10.0) } else { (10.0, 0.0) };
        a.push(family(c));
        p.push(family(c));
        n.push(family(other));
    }
    assert_eq!(triplet_accuracy(&a, &p, &n).unwrap(), 100.0);
}

#[test]
fn geometric_features_are_finite_and_sized() {
    let (p, _) = setup(4, 3);
    let plan = synth_floorplan(4, 4, 64);
    let r = rasterize(
        &plan,
        &RasterOptions {
            resolution: 80,
            ..RasterOptions::default()
        },
    )
    .unwrap();
    let d = density_map(&r.mask).unwrap();
    let f = geometric_features(&p, &d, None);
    assert_eq!(f.rows, p.len());
    assert!(f.data.iter().all(|v| v.is_finite()));
    let total: f64 = f.iter_rows().map(|row| row[0]).sum();
    let expected = r.mask.interior_count() as f64 * r.transform.meters_per_pixel.powi(2);
    assert!((total - expected).abs() < 1e-6 * expected);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pooling_matches_oracle(seed in 0u64..100_000, m in 1u32..5) {
        let (p, fmap) = setup(seed, m);
        let mean = region_pool(&fmap, &p, Reducer::Mean).unwrap();
        let oracle = oracle_pool_mean(&fmap, &p);
        for (i, want) in oracle.iter().enumerate() {
            for (got, want) in mean.row(i).iter().zip(want) {
                prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0));
            }
        }
        let max = region_pool(&fmap, &p, Reducer::Max).unwrap();
        for r in &p.regions {
            for c in 0..fmap.channels {
                let want = r.pixels.iter().map(|&(x, y)| fmap.pixel(x, y)[c] as f64).fold(f64::NEG_INFINITY, f64::max);
                prop_assert_eq!(max.row(r.id)[c], want);
            }
        }
    }

    #[test]
    fn mean_pool_commutes_with_refine(seed in 0u64..100_000, factor in 2u32..4) {
        let (p, fmap) = setup(seed, 2);
        let fine = refine(&p, factor);
        let coarse_f = region_pool(&fmap, &p, Reducer::Mean).unwrap();
        let fine_f = region_pool(&fmap, &fine, Reducer::Mean).unwrap();
        for parent in &p.regions {
            let mut acc = vec![0.0; fmap.channels];
            let mut n = 0.0;
            for child in fine.regions.iter().filter(|c| {
                let (x, y) = c.pixels[0];
                *p.region_id_grid.get(x, y) == parent.id as i32
            }) {
                let w = child.pixels.len() as f64;
                for (a, v) in acc.iter_mut().zip(fine_f.row(child.id)) {
                    *a += w * v;
                }
                n += w;
            }
            prop_assert_eq!(n as usize, parent.pixels.len());
            for (a, want) in acc.iter().zip(coarse_f.row(parent.id)) {
                prop_assert!((a / n - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn embedding_ignores_order(
        data in proptest::collection::vec(proptest::collection::vec(-1e3f64..1e3, 4), 1..64),
        seed in any::<u64>(),
    ) {
        let base = embed(&rows(data.clone())).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let mut shuffled = data.clone();
            shuffled.shuffle(&mut rng);
            prop_assert_eq!(&embed(&rows(shuffled)).unwrap(), &base);
        }
        for c in 0..4 {
            prop_assert!(data.iter().all(|row| row[c] <= base.0[c]));
            prop_assert!(data.iter().any(|row| row[c] == base.0[c]));
        }
    }

    #[test]
    fn distances_form_a_metric(data in proptest::collection::vec(proptest::collection::vec(-50f64..50.0, 3), 1..16)) {
        let s = pairwise_distance(&rows(data.clone()));
        for i in 0..data.len() {
            prop_assert_eq!(s.get(i, i), 0.0);
            for j in 0..data.len() {
                prop_assert_eq!(s.get(i, j), s.get(j, i));
                prop_assert!((s.get(i, j) - euclid(&data[i], &data[j])).abs() < 1e-9);
                for k in 0..data.len() {
                    prop_assert!(s.get(i, k) <= s.get(i, j) + s.get(j, k) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn grouping_coarsens_with_threshold(
        data in proptest::collection::vec(proptest::collection::vec(0f64..10.0, 2), 1..24),
        t1 in 0f64..8.0,
        dt in 0f64..8.0,
    ) {
        let s = pairwise_distance(&rows(data.clone()));
        let fine = group_instances(&s, t1);
        let coarse = group_instances(&s, t1 + dt);
        for i in 0..data.len() {
            for j in 0..data.len() {
                if fine[i] == fine[j] {
                    prop_assert_eq!(coarse[i], coarse[j]);
                }
            }
        }
        let singletons = group_instances(&s, 0.0);
        prop_assert_eq!(singletons, (0..data.len()).collect::<Vec<_>>());
        prop_assert!(group_instances(&s, f64::INFINITY).iter().all(|&g| g == 0));
    }
}
