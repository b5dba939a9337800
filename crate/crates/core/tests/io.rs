use std::io::Cursor;

use floorgrid::density::density_map;
use floorgrid::encoding::RegionFeatures;
use floorgrid::grid::Grid;
use floorgrid::io::csv::{features_from_csv, features_to_csv};
use floorgrid::io::pgm::{read_pgm, write_pgm, PgmFormat};
use floorgrid::io::sidecar::PartitionSidecar;
use floorgrid::io::{read_fgrd, read_fgrd_frames, write_fgrd, FgrdCell};
use floorgrid::partition::{cluster_density_regions, split_unit_regions, SplitStrategy};
use floorgrid::raster::{rasterize, RasterOptions};
use floorgrid::synth::synth_floorplan;
use floorgrid::Error;
use proptest::prelude::*;

fn round_trip<T: FgrdCell + Clone + std::fmt::Debug + PartialEq>(g: &Grid<T>) -> Grid<T> {
    let mut buf = Vec::new();
    write_fgrd(&mut buf, g).unwrap();
    read_fgrd(&mut Cursor::new(buf)).unwrap()
}

fn grid_of<T: std::fmt::Debug + Clone>(
    elem: impl Strategy<Value = T> + Clone,
) -> impl Strategy<Value = Grid<T>> {
    (1usize..20, 1usize..20).prop_flat_map(move |(w, h)| {
        proptest::collection::vec(elem.clone(), w * h)
            .prop_map(move |v| Grid::from_vec(w, h, v).unwrap())
    })
}

#[test]
fn wrong_cell_type_is_rejected() {
    let mut buf = Vec::new();
    write_fgrd(&mut buf, &Grid::new(3, 2, 1u8)).unwrap();
    assert!(read_fgrd::<i32>(&mut Cursor::new(buf.clone())).is_err());
    buf[0] = b'X';
    assert!(matches!(
        read_fgrd::<u8>(&mut Cursor::new(buf)),
        Err(Error::Parse(_))
    ));
}

#[test]
fn multi_frame_round_trip() {
    let frames = vec![
        Grid::new(4, 3, 1.5f32),
        Grid::from_fn(4, 3, |x, y| (x * 10 + y) as f32),
    ];
    let mut buf = Vec::new();
    for f in &frames {
        write_fgrd(&mut buf, f).unwrap();
    }
    assert_eq!(
        read_fgrd_frames::<f32>(&mut Cursor::new(buf)).unwrap(),
        frames
    );
}

#[test]
fn pgm_flips_rows_and_reads_back() {
    let g = Grid::from_fn(5, 3, |x, y| (x + 10 * y) as u8);
    for format in [PgmFormat::Plain, PgmFormat::Raw] {
        let mut buf = Vec::new();
        write_pgm(&mut buf, &g, format).unwrap();
        assert_eq!(read_pgm(&buf).unwrap(), g);
    }
}

#[test]
fn partition_sidecar_round_trip() {
    let plan = synth_floorplan(12, 5, 64);
    let r = rasterize(&plan, &RasterOptions::default()).unwrap();
    let regions = cluster_density_regions(&density_map(&r.mask).unwrap()).unwrap();
    let p = split_unit_regions(
        &regions,
        &SplitStrategy::new(4, 4, 1.0).unwrap(),
        r.transform.meters_per_pixel,
    );
    let sidecar = PartitionSidecar::of(&p);
    let text = sidecar.to_json();
    let back = PartitionSidecar::from_json(&text).unwrap();
    assert_eq!(back.to_json(), text);
    let ids = round_trip(&p.region_id_grid);
    assert_eq!(back.into_partition(ids).unwrap(), p);
}

proptest! {
    #[test]
    fn fgrd_u8(g in grid_of(any::<u8>())) { prop_assert_eq!(round_trip(&g), g); }

    #[test]
    fn fgrd_i32(g in grid_of(any::<i32>())) { prop_assert_eq!(round_trip(&g), g); }

    #[test]
    fn fgrd_u32(g in grid_of(any::<u32>())) { prop_assert_eq!(round_trip(&g), g); }

    #[test]
    fn fgrd_f32_bits(g in grid_of(any::<u32>())) {
        let g = g.map(|&b| f32::from_bits(b));
        let back = round_trip(&g);
        prop_assert_eq!(back.map(|v| v.to_bits()), g.map(|v| v.to_bits()));
    }

    #[test]
    fn fgrd_f64_bits(g in grid_of(any::<u64>())) {
        let g = g.map(|&b| f64::from_bits(b));
        let back = round_trip(&g);
        prop_assert_eq!(back.map(|v| v.to_bits()), g.map(|v| v.to_bits()));
    }

    #[test]
    fn csv_is_lossless(data in proptest::collection::vec(proptest::collection::vec(-1e12f64..1e12, 5), 1..20)) {
        let r = RegionFeatures::from_rows(&data).unwrap();
        let header: Vec<String> = (0..5).map(|i| format!("f{i}")).collect();
        prop_assert_eq!(&features_from_csv(&features_to_csv(&r, Some(&header))).unwrap(), &r);
        prop_assert_eq!(&features_from_csv(&features_to_csv(&r, None)).unwrap(), &r);
    }
}
