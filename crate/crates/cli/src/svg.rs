//! Static SVG figures over the raster grid. Output depends only on the
//! inputs, so repeated runs are byte-identical.

use std::fmt::Write as _;

use floorgrid::density::{DensityMap, NormalizedDensityMap};
use floorgrid::floorplan::{Floorplan, OpeningKind};
use floorgrid::geometry::{trace_cells, Point};
use floorgrid::grid::{Grid, PixelRect};
use floorgrid::labeling::LabelMap;
use floorgrid::partition::{cluster_density_regions, UnitRegionPartition};
use floorgrid::raster::RasterTransform;

pub struct Svg {
    height: usize,
    body: String,
    header: String,
}

impl Svg {
    pub fn new(width: usize, height: usize) -> Self {
        let header = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            w = width * 3,
            h = height * 3,
        );
        let mut svg = Self {
            height,
            body: String::new(),
            header,
        };
        let _ = writeln!(svg.body, "<g transform=\"scale(3)\">");
        let _ = writeln!(
            svg.body,
            "<rect width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>"
        );
        svg
    }

    fn y(&self, y: f64) -> f64 {
        self.height as f64 - y
    }

    pub fn rect(&mut self, x: usize, y: usize, w: usize, h: usize, fill: &str) {
        let top = self.height - y - h;
        let _ = writeln!(
            self.body,
            "<rect x=\"{x}\" y=\"{top}\" width=\"{w}\" height=\"{h}\" fill=\"{fill}\"/>"
        );
    }

    /// One `<path>` holding every ring; `attrs` is spliced in verbatim.
    pub fn rings(&mut self, rings: &[Vec<Point>], attrs: &str) {
        let mut d = String::new();
        for ring in rings {
            for (i, p) in ring.iter().enumerate() {
                let _ = write!(
                    d,
                    "{}{} {} ",
                    if i == 0 { "M" } else { "L" },
                    num(p.x),
                    num(self.y(p.y))
                );
            }
            d.push_str("Z ");
        }
        let _ = writeln!(self.body, "<path d=\"{}\" {attrs}/>", d.trim_end());
    }

    pub fn line(&mut self, a: Point, b: Point, attrs: &str) {
        let _ = writeln!(
            self.body,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {attrs}/>",
            num(a.x),
            num(self.y(a.y)),
            num(b.x),
            num(self.y(b.y))
        );
    }

    pub fn text(&mut self, at: Point, size: f64, class: &str, text: &str) {
        let _ = writeln!(
            self.body,
            "<text x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"middle\" class=\"{class}\">{}</text>",
            num(at.x),
            num(self.y(at.y)),
            num(size),
            escape(text)
        );
    }

    pub fn finish(mut self) -> String {
        self.body.push_str("</g>\n</svg>\n");
        self.header + &self.body
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Linear blend between two RGB colors.
fn blend(lo: [u8; 3], hi: [u8; 3], t: f64) -> String {
    let c: Vec<u8> = lo
        .iter()
        .zip(hi)
        .map(|(&a, b)| (a as f64 + (b as f64 - a as f64) * t).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Distinct, stable color per index.
pub fn palette(i: usize) -> String {
    let hue = (i as u64 * 137) % 360;
    format!("hsl({hue},65%,72%)")
}

/// Outline rings of the pixels where `member` holds, within `bbox`, in
/// grid coordinates.
fn outline(bbox: PixelRect, member: impl Fn(usize, usize) -> bool) -> Vec<Vec<Point>> {
    trace_cells(bbox.width(), bbox.height(), |x, y| {
        member(bbox.x0 + x, bbox.y0 + y)
    })
    .into_iter()
    .map(|ring| {
        ring.into_iter()
            .map(|p| Point::new(p.x + bbox.x0 as f64, p.y + bbox.y0 as f64))
            .collect()
    })
    .collect()
}

fn centroid(pixels: &[(usize, usize)]) -> Point {
    let n = pixels.len().max(1) as f64;
    let (sx, sy) = pixels.iter().fold((0.0, 0.0), |(sx, sy), &(x, y)| {
        (sx + x as f64 + 0.5, sy + y as f64 + 0.5)
    });
    Point::new(sx / n, sy / n)
}

/// Density heat as horizontal runs of equal raw sum.
fn density_heat(svg: &mut Svg, d: &DensityMap) {
    let inside: Vec<f64> = d
        .values
        .as_slice()
        .iter()
        .copied()
        .filter(|&v| v > 0.0)
        .collect();
    let lo = inside.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for y in 0..d.height() {
        let mut x = 0;
        while x < d.width() {
            let key = *d.raw_sums.get(x, y);
            let start = x;
            while x < d.width() && *d.raw_sums.get(x, y) == key {
                x += 1;
            }
            if key == 0 {
                continue;
            }
            let v = *d.values.get(start, y);
            let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
            svg.rect(
                start,
                y,
                x - start,
                1,
                &blend([255, 245, 235], [217, 72, 1], t),
            );
        }
    }
}

fn ridges(svg: &mut Svg, n: &NormalizedDensityMap) {
    for y in 0..n.values.height() {
        for x in 0..n.values.width() {
            let v = *n.values.get(x, y);
            if v > 0.0 {
                svg.rect(
                    x,
                    y,
                    1,
                    1,
                    &format!("rgba(0,0,0,{})", num((v * 0.25).min(0.25))),
                );
            }
        }
    }
}

fn plan_outline(svg: &mut Svg, plan: &Floorplan, t: &RasterTransform) {
    svg.rings(
        &[t.apply_ring(&plan.vertices)],
        "class=\"plan-outline\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"",
    );
    for o in &plan.openings {
        let color = match o.kind {
            OpeningKind::FrontDoor => "#d62728",
            OpeningKind::Door => "#2ca02c",
            OpeningKind::Window => "#1f77b4",
        };
        svg.line(
            t.apply(o.a),
            t.apply(o.b),
            &format!("class=\"opening\" stroke=\"{color}\" stroke-width=\"2\""),
        );
    }
}

fn region_outlines(svg: &mut Svg, p: &UnitRegionPartition) {
    for r in &p.regions {
        let id = r.id as i32;
        let rings = outline(r.bbox, |x, y| *p.region_id_grid.get(x, y) == id);
        svg.rings(
            &rings,
            "class=\"region-outline\" fill=\"none\" stroke=\"#3c3c3c\" stroke-width=\"0.35\"",
        );
    }
}

/// Class names at the centroid of each connected same-label area.
fn label_text(svg: &mut Svg, labels: &LabelMap, size: f64) {
    let keys = Grid::from_vec(
        labels.width(),
        labels.height(),
        labels
            .labels
            .as_slice()
            .iter()
            .map(|&l| if l < 0 { 0 } else { l as u32 + 1 })
            .collect(),
    )
    .expect("same shape");
    let Ok(areas) = cluster_density_regions(&DensityMap::from_raw_sums(keys)) else {
        return;
    };
    for area in &areas.regions {
        let class = area.density_key as usize - 1;
        let name = labels
            .class_names
            .get(class)
            .cloned()
            .unwrap_or_else(|| class.to_string());
        svg.text(centroid(&area.pixels), size, "region-label", &name);
    }
}

/// Plan outline over density heat, gradient ridges, unit-region borders and
/// labels.
pub fn overlay(
    plan: &Floorplan,
    t: &RasterTransform,
    d: &DensityMap,
    n: &NormalizedDensityMap,
    p: &UnitRegionPartition,
    labels: Option<&LabelMap>,
) -> String {
    let mut svg = Svg::new(t.width, t.height);
    density_heat(&mut svg, d);
    ridges(&mut svg, n);
    region_outlines(&mut svg, p);
    plan_outline(&mut svg, plan, t);
    if let Some(labels) = labels {
        label_text(&mut svg, labels, (t.width as f64 / 40.0).max(3.0));
    }
    svg.finish()
}

/// Unit regions filled by instance, with each instance's room label.
pub fn instances(
    plan: &Floorplan,
    t: &RasterTransform,
    p: &UnitRegionPartition,
    instance_of: &[usize],
    room_labels: &[i32],
    class_names: &[String],
) -> String {
    let mut svg = Svg::new(t.width, t.height);
    for r in &p.regions {
        let id = r.id as i32;
        let rings = outline(r.bbox, |x, y| *p.region_id_grid.get(x, y) == id);
        let attrs = format!(
            "class=\"instance-region\" data-instance=\"{}\" fill=\"{}\" stroke=\"#ffffff\" stroke-width=\"0.3\"",
            instance_of[r.id],
            palette(instance_of[r.id])
        );
        svg.rings(&rings, &attrs);
    }
    plan_outline(&mut svg, plan, t);
    let size = (t.width as f64 / 40.0).max(3.0);
    for (inst, &label) in room_labels.iter().enumerate() {
        let pixels: Vec<(usize, usize)> = p
            .regions
            .iter()
            .filter(|r| instance_of[r.id] == inst)
            .flat_map(|r| r.pixels.iter().copied())
            .collect();
        let name = usize::try_from(label)
            .ok()
            .and_then(|l| class_names.get(l).cloned())
            .unwrap_or_else(|| "unlabeled".into());
        svg.text(centroid(&pixels), size, "instance-label", &name);
    }
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_are_compact() {
        assert_eq!(num(3.0), "3");
        assert_eq!(num(2.5), "2.5");
        assert_eq!(num(-0.001), "0");
        assert_eq!(num(1.239), "1.24");
    }

    #[test]
    fn outline_of_l_cells() {
        let bbox = PixelRect {
            x0: 2,
            y0: 3,
            x1: 4,
            y1: 5,
        };
        let rings = outline(bbox, |x, y| !(x == 3 && y == 4));
        assert_eq!(rings.len(), 1);
        assert!(rings[0].iter().all(|p| p.x >= 2.0 && p.y >= 3.0));
    }
}
