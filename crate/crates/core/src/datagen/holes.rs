use rand::Rng as _;
use serde_json::json;

use super::{DatasetMeta, Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::geometry::{Point2, PointCloud};
use crate::rng::{derive_seed, rng_from_seed, stream};

pub const HOLE_COUNTS: [usize; 5] = [0, 1, 2, 4, 9];

/// Thickness of the three-dimensional slab extrusions.
pub const SLAB_HEIGHT: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Outline {
    /// Unit disk.
    Disk,
    /// The square `[-1, 1]^2`.
    Square,
}

/// A planar region with `k` holes: the unit disk with round holes or the
/// square `[-1, 1]^2` with axis-aligned square holes.
#[derive(Clone, Debug, PartialEq)]
pub struct HoleRegion {
    outline: Outline,
    centers: Vec<Point2>,
    /// Hole radius, or half the side of a square hole.
    size: f64,
}

fn grid(coords: &[f64]) -> Vec<Point2> {
    coords.iter().flat_map(|&y| coords.iter().map(move |&x| [x, y])).collect()
}

impl HoleRegion {
    pub fn round(k: usize) -> Result<Self> {
        let (centers, size) = match k {
            0 => (vec![], 0.0),
            1 => (vec![[0.0, 0.0]], 0.4),
            2 => (vec![[-0.45, 0.0], [0.45, 0.0]], 0.25),
            4 => (grid(&[-0.4, 0.4]), 0.2),
            9 => (grid(&[-0.5, 0.0, 0.5]), 0.14),
            _ => return Err(Error::invalid(format!("no catalog shape with {k} holes"))),
        };
        Ok(Self { outline: Outline::Disk, centers, size })
    }

    pub fn square(k: usize) -> Result<Self> {
        let (centers, size) = match k {
            0 => (vec![], 0.0),
            1 => (vec![[0.0, 0.0]], 0.35),
            2 => (vec![[-0.5, 0.0], [0.5, 0.0]], 0.25),
            4 => (grid(&[-0.5, 0.5]), 0.22),
            9 => (grid(&[-0.6, 0.0, 0.6]), 0.16),
            _ => return Err(Error::invalid(format!("no catalog shape with {k} holes"))),
        };
        Ok(Self { outline: Outline::Square, centers, size })
    }

    pub fn hole_count(&self) -> usize {
        self.centers.len()
    }

    pub fn contains(&self, p: Point2) -> bool {
        let inside = match self.outline {
            Outline::Disk => p[0] * p[0] + p[1] * p[1] <= 1.0,
            Outline::Square => p[0].abs() <= 1.0 && p[1].abs() <= 1.0,
        };
        inside
            && self.centers.iter().all(|c| {
                let (dx, dy) = (p[0] - c[0], p[1] - c[1]);
                match self.outline {
                    Outline::Disk => dx * dx + dy * dy > self.size * self.size,
                    Outline::Square => dx.abs() > self.size || dy.abs() > self.size,
                }
            })
    }

    /// Uniform sample by rejection from `[-1, 1]^2`, optionally extruded
    /// uniformly over `[0, SLAB_HEIGHT]`.
    pub fn sample(&self, n: usize, slab: bool, seed: u64) -> Result<PointCloud> {
        let mut rng = rng_from_seed(seed);
        let dim = if slab { 3 } else { 2 };
        let mut coords = Vec::with_capacity(n * dim);
        while coords.len() < n * dim {
            let p = [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)];
            if self.contains(p) {
                coords.extend_from_slice(&p);
                if slab {
                    coords.push(rng.random_range(0.0..=SLAB_HEIGHT));
                }
            }
        }
        PointCloud::new(dim, coords)
    }
}

/// Twenty shapes, four per hole count: disk with round holes, square with
/// square holes, and slab extrusions of both. Items are ordered by shape,
/// then cloud.
pub fn gen_holes_dataset(
    clouds_per_shape: usize,
    points_per_cloud: usize,
    seed: u64,
) -> Result<LabeledDataset<PointCloud>> {
    if clouds_per_shape == 0 || points_per_cloud == 0 {
        return Err(Error::invalid("holes dataset needs at least one cloud and one point"));
    }
    let mut shapes = Vec::new();
    for k in HOLE_COUNTS {
        shapes.push((format!("disk_round_{k}"), HoleRegion::round(k)?, false, k));
        shapes.push((format!("square_square_{k}"), HoleRegion::square(k)?, false, k));
        shapes.push((format!("slab_disk_round_{k}"), HoleRegion::round(k)?, true, k));
        shapes.push((format!("slab_square_square_{k}"), HoleRegion::square(k)?, true, k));
    }
    let total = shapes.len() * clouds_per_shape;
    let mut items = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut item_seeds = Vec::with_capacity(total);
    let mut shape_ids = Vec::with_capacity(total);
    for (id, region, slab, k) in &shapes {
        for _ in 0..clouds_per_shape {
            let s = derive_seed(seed, stream::ITEM, items.len() as u64);
            items.push(region.sample(points_per_cloud, *slab, s)?);
            labels.push(Label::Class(*k as i64));
            item_seeds.push(s);
            shape_ids.push(id.clone());
        }
    }
    Ok(LabeledDataset {
        items,
        labels,
        meta: DatasetMeta {
            generator: "holes".into(),
            seed,
            item_seeds,
            shape_ids,
            params: json!({ "clouds_per_shape": clouds_per_shape, "points_per_cloud": points_per_cloud }),
        },
    })
}
