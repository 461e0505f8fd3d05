use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;
use std::str::FromStr;

use super::{DatasetMeta, Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::geometry::{
    convex_hull, convexity_measure, point_in_polygon, rasterize, BinaryMask, Point2, PointCloud, Polygon, RasterSource,
};
use crate::rng::{derive_seed, rng_from_seed, stream, Rng};

pub const CONCAVE_RETRIES: usize = 100;

/// A planar shape that can be sampled uniformly.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Polygon(Polygon),
    /// Unit disk.
    Disk,
    /// Unit disk minus the sector of angular `width` starting at `start`.
    WedgeDisk {
        start: f64,
        width: f64,
    },
}

impl Shape {
    pub fn contains(&self, p: Point2) -> bool {
        match self {
            Shape::Polygon(poly) => point_in_polygon(p, poly),
            Shape::Disk => p[0].hypot(p[1]) <= 1.0,
            Shape::WedgeDisk { start, width } => {
                let a = (p[1].atan2(p[0]) - start).rem_euclid(TAU);
                p[0].hypot(p[1]) <= 1.0 && a >= *width
            }
        }
    }

    pub fn bounds(&self) -> (Point2, Point2) {
        match self {
            Shape::Polygon(poly) => poly.bounds(),
            _ => ([-1.0, -1.0], [1.0, 1.0]),
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Shape::Polygon(poly) => poly.is_convex(),
            Shape::Disk => true,
            Shape::WedgeDisk { width, .. } => *width <= 0.0,
        }
    }

    /// Regular `n`-gon with circumradius 1, first vertex at angle `phase`.
    pub fn regular_polygon(n: usize, phase: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid(format!("a regular polygon needs 3 or more vertices, got {n}")));
        }
        let v = (0..n)
            .map(|i| {
                let a = phase + TAU * i as f64 / n as f64;
                [a.cos(), a.sin()]
            })
            .collect();
        Ok(Shape::Polygon(Polygon::new(v)?))
    }

    /// `n`-pointed star with outer radius 1 and inner radius `ratio`. The
    /// star is only concave while `ratio < cos(pi / n)`.
    pub fn star(n: usize, ratio: f64, phase: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid(format!("a star needs 3 or more points, got {n}")));
        }
        let limit = (PI / n as f64).cos();
        if !(ratio > 0.0 && ratio < limit - 1e-9) {
            return Err(Error::invalid(format!(
                "inner radius ratio {ratio} of a {n}-pointed star must lie in (0, {limit:.4})"
            )));
        }
        let v = (0..2 * n)
            .map(|i| {
                let r = if i % 2 == 0 { 1.0 } else { ratio };
                let a = phase + PI * i as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        Ok(Shape::Polygon(Polygon::new(v)?))
    }
}

/// `n` points uniform in `shape`, by rejection from its bounding box.
pub fn sample_shape(shape: &Shape, n: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = rng_from_seed(seed);
    let (lo, hi) = shape.bounds();
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let p = [rng.random_range(lo[0]..=hi[0]), rng.random_range(lo[1]..=hi[1])];
        if shape.contains(p) {
            pts.push(p);
        }
    }
    PointCloud::from_2d(&pts)
}

fn random_hull(rng: &mut Rng) -> Polygon {
    loop {
        let pts: Vec<Point2> = (0..10).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
        if let Ok(h) = convex_hull(&pts) {
            return h;
        }
    }
}

/// Convex hull of ten uniform points in the unit square.
pub fn gen_random_convex_polygon(seed: u64) -> Polygon {
    random_hull(&mut rng_from_seed(seed))
}

/// A random convex hull with between one and half of its edges indented:
/// the edge midpoint moves toward the centroid by a factor in [0.3, 0.8]
/// and becomes a new vertex. Draws are repeated until the indentation
/// lowers the convexity measure of a 40x40 rasterization below one.
pub fn gen_random_concave_polygon(seed: u64) -> Result<Polygon> {
    let mut rng = rng_from_seed(seed);
    for _ in 0..CONCAVE_RETRIES {
        let hull = random_hull(&mut rng);
        let v = hull.vertices();
        let h = v.len();
        let count = rng.random_range(1..=h.div_ceil(2));
        let mut chosen = vec![false; h];
        for i in sample(&mut rng, h, count) {
            chosen[i] = true;
        }
        let c = hull.centroid();
        let mut out = Vec::with_capacity(h + count);
        for i in 0..h {
            out.push(v[i]);
            if chosen[i] {
                let f: f64 = rng.random_range(0.3..=0.8);
                let (a, b) = (v[i], v[(i + 1) % h]);
                let m = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
                out.push([m[0] + f * (c[0] - m[0]), m[1] + f * (c[1] - m[1])]);
            }
        }
        if let Ok(poly) = Polygon::new(out) {
            if !poly.is_convex() && visible_at_check_resolution(&poly)? {
                return Ok(poly);
            }
        }
    }
    Err(Error::RetriesExhausted(CONCAVE_RETRIES))
}

/// Raster side at which an indentation must lower the convexity measure.
pub const CONCAVE_CHECK_SIDE: usize = 40;

fn visible_at_check_resolution(poly: &Polygon) -> Result<bool> {
    let mask = rasterize(RasterSource::Polygon(poly), CONCAVE_CHECK_SIDE)?;
    Ok(convexity_measure(&mask)? < 1.0)
}

/// Largest distance from a polygon vertex to the boundary of the convex
/// hull; zero for convex polygons.
pub fn indentation_depth(poly: &Polygon) -> f64 {
    let hull = convex_hull(poly.vertices()).expect("a valid polygon has a two-dimensional hull");
    poly.vertices()
        .iter()
        .map(|&p| {
            hull.edges()
                .map(|(a, b)| {
                    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                    ((p[0] - a[0]) * dy - (p[1] - a[1]) * dx).abs() / dx.hypot(dy)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvexityKind {
    /// Triangle, square, pentagon and disk, against 3-, 4- and 5-pointed
    /// stars and a disk with a quarter wedge removed.
    Regular,
    /// Random convex hulls against their indented versions.
    Random,
}

impl fmt::Display for ConvexityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConvexityKind::Regular => "regular",
            ConvexityKind::Random => "random",
        })
    }
}

impl FromStr for ConvexityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular" => Ok(ConvexityKind::Regular),
            "random" => Ok(ConvexityKind::Random),
            _ => Err(Error::invalid(format!("unknown convexity kind '{s}'"))),
        }
    }
}

/// Inner radius ratio of the concave stars. The 3-pointed star uses a
/// smaller ratio because 0.5 already gives back the triangle.
fn star_ratio(points: usize) -> f64 {
    if points == 3 {
        0.25
    } else {
        0.5
    }
}

/// The eight regular shapes in a fixed pose: a vertex points up and the
/// wedge opens to the right.
fn regular_shape(index: usize) -> Result<(String, Shape, bool)> {
    let phase = FRAC_PI_2;
    Ok(match index {
        0 => ("triangle".into(), Shape::regular_polygon(3, phase)?, true),
        1 => ("square".into(), Shape::regular_polygon(4, phase)?, true),
        2 => ("pentagon".into(), Shape::regular_polygon(5, phase)?, true),
        3 => ("disk".into(), Shape::Disk, true),
        4 => ("star3".into(), Shape::star(3, star_ratio(3), phase)?, false),
        5 => ("star4".into(), Shape::star(4, star_ratio(4), phase)?, false),
        6 => ("star5".into(), Shape::star(5, star_ratio(5), phase)?, false),
        _ => ("wedge_disk".into(), Shape::WedgeDisk { start: -FRAC_PI_4, width: FRAC_PI_2 }, false),
    })
}

/// Labels are 1 for convex and 0 for concave shapes; the first half of the
/// items is convex. Clouds of one regular shape differ only by sampling.
pub fn gen_convexity_dataset(
    kind: ConvexityKind,
    per_class: usize,
    points: usize,
    seed: u64,
) -> Result<LabeledDataset<PointCloud>> {
    if kind == ConvexityKind::Regular && !per_class.is_multiple_of(4) {
        return Err(Error::invalid(format!(
            "regular convexity data needs a multiple of 4 clouds per class, got {per_class}"
        )));
    }
    let total = 2 * per_class;
    let mut items = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut item_seeds = Vec::with_capacity(total);
    let mut shape_ids = Vec::with_capacity(total);
    for i in 0..total {
        let s = derive_seed(seed, stream::ITEM, i as u64);
        let mut rng = rng_from_seed(s);
        let convex = i < per_class;
        let (id, shape) = match kind {
            ConvexityKind::Regular => {
                let shape_index = (i % per_class) / (per_class / 4) + if convex { 0 } else { 4 };
                let (id, shape, _) = regular_shape(shape_index)?;
                (id, shape)
            }
            ConvexityKind::Random if convex => ("random_convex".into(), Shape::Polygon(random_hull(&mut rng))),
            ConvexityKind::Random => {
                ("random_concave".into(), Shape::Polygon(gen_random_concave_polygon(rng.random())?))
            }
        };
        items.push(sample_shape(&shape, points, rng.random())?);
        labels.push(Label::Class(i64::from(convex)));
        item_seeds.push(s);
        shape_ids.push(id);
    }
    Ok(LabeledDataset {
        items,
        labels,
        meta: DatasetMeta {
            generator: format!("convexity_{kind}"),
            seed,
            item_seeds,
            shape_ids,
            params: json!({ "kind": kind, "per_class": per_class, "points": points }),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskCorpusConfig {
    pub count: usize,
    pub side: usize,
    /// Share of masks drawn from indented polygons.
    pub concave_fraction: f64,
}

impl Default for MaskCorpusConfig {
    fn default() -> Self {
        Self { count: 200, side: 30, concave_fraction: 0.5 }
    }
}

/// Rasterized random convex and indented polygons labeled by their
/// convexity measure. Like leaf silhouettes every mask is one connected
/// piece: a polygon whose raster falls apart is redrawn.
pub fn gen_mask_corpus(config: &MaskCorpusConfig, seed: u64) -> Result<LabeledDataset<BinaryMask>> {
    if !(0.0..=1.0).contains(&config.concave_fraction) {
        return Err(Error::invalid("concave fraction must lie in [0, 1]"));
    }
    let concave = (config.concave_fraction * config.count as f64).round() as usize;
    let mut items = Vec::with_capacity(config.count);
    let mut labels = Vec::with_capacity(config.count);
    let mut item_seeds = Vec::with_capacity(config.count);
    let mut shape_ids = Vec::with_capacity(config.count);
    for i in 0..config.count {
        let base = derive_seed(seed, stream::ITEM, i as u64);
        let id = if i < concave { "random_concave" } else { "random_convex" };
        let mut drawn = None;
        for attempt in 0..CONCAVE_RETRIES as u64 {
            let s = if attempt == 0 { base } else { derive_seed(base, stream::ITEM, attempt) };
            let poly = if i < concave { gen_random_concave_polygon(s)? } else { gen_random_convex_polygon(s) };
            let mask = rasterize(RasterSource::Polygon(&poly), config.side)?;
            if mask.component_count() == 1 {
                drawn = Some((s, mask));
                break;
            }
        }
        let (s, mask) = drawn.ok_or(Error::RetriesExhausted(CONCAVE_RETRIES))?;
        labels.push(Label::Value(convexity_measure(&mask)?));
        items.push(mask);
        item_seeds.push(s);
        shape_ids.push(id.to_string());
    }
    Ok(LabeledDataset {
        items,
        labels,
        meta: DatasetMeta {
            generator: "masks".into(),
            seed,
            item_seeds,
            shape_ids,
            params: serde_json::to_value(config)?,
        },
    })
}
