//! Point-cloud and mask primitives.

mod mask;
mod metric;
mod polygon;
mod transform;

pub use mask::{convexity_measure, rasterize, BinaryMask, RasterSource};
pub use metric::{
    absolute_height, dtm, dtm_subset, euclidean_distance_matrix, farthest_point_indices, farthest_point_subsample,
    geodesic_distance, geodesic_distance_matrix, height, tubular_distance,
};
pub use polygon::{convex_hull, point_in_polygon, polygon_area, Polygon};
pub use transform::{apply_transform, Transform, TransformKind, TransformSpec};

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];

/// Extrinsic samples in R^2 or R^3, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::invalid(format!("point dimension must be 2 or 3, got {dim}")));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not form a nonempty set of {dim}-d points",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("non-finite coordinate in point {}", bad / dim)));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::invalid(format!("point {i} has a different dimension")));
        }
        Self::new(dim, rows.iter().flatten().copied().collect())
    }

    pub fn from_2d(points: &[Point2]) -> Result<Self> {
        Self::new(2, points.iter().flatten().copied().collect())
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Per-axis minimum and maximum.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for (a, &c) in p.iter().enumerate() {
                lo[a] = lo[a].min(c);
                hi[a] = hi[a].max(c);
            }
        }
        (lo, hi)
    }

    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return Err(Error::invalid(format!("index {i} out of range")));
            }
            coords.extend_from_slice(self.point(i));
        }
        Self::new(self.dim, coords)
    }

    pub(crate) fn map_points(&self, mut f: impl FnMut(&mut [f64])) -> Result<Self> {
        let mut coords = self.coords.clone();
        for p in coords.chunks_exact_mut(self.dim) {
            f(p);
        }
        Self::new(self.dim, coords)
    }
}

/// Intrinsic samples of a unit geodesic disk of constant curvature, in
/// geodesic polar coordinates around the disk center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarCloud {
    coords: Vec<(f64, f64)>,
    curvature: f64,
}

impl PolarCloud {
    pub fn new(coords: Vec<(f64, f64)>, curvature: f64) -> Result<Self> {
        check_curvature(curvature)?;
        if coords.is_empty() {
            return Err(Error::invalid("polar cloud is empty"));
        }
        for (i, &(rho, phi)) in coords.iter().enumerate() {
            if !(0.0..=1.0 + 1e-12).contains(&rho) {
                return Err(Error::invalid(format!("point {i}: radius {rho} outside [0, 1]")));
            }
            if !(0.0..TAU).contains(&phi) {
                return Err(Error::invalid(format!("point {i}: azimuth {phi} outside [0, 2pi)")));
            }
        }
        Ok(Self { coords, curvature })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }
}

pub(crate) fn check_curvature(kappa: f64) -> Result<()> {
    if !kappa.is_finite() || !(-2.0..=2.0).contains(&kappa) {
        return Err(Error::CurvatureOutOfRange(kappa));
    }
    Ok(())
}

/// Symmetric pairwise distances with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::invalid(format!("expected {n}x{n} entries, got {}", entries.len())));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::invalid(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let a = entries[i * n + j];
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::invalid(format!("bad entry ({i}, {j}) = {a}")));
                }
                if a != entries[j * n + i] {
                    return Err(Error::invalid(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, entries })
    }

    /// Builds the matrix from a symmetric distance function evaluated on
    /// the strict lower triangle.
    pub(crate) fn from_fn(n: usize, mut dist: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..i {
                let d = dist(i, j);
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        Self { n, entries }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }
}

/// An infinite line in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    anchor: Point2,
    direction: Point2,
}

impl Line {
    /// The direction is normalized; a zero or non-finite direction is rejected.
    pub fn new(anchor: Point2, direction: Point2) -> Result<Self> {
        let norm = direction[0].hypot(direction[1]);
        if !(norm.is_finite() && norm > 0.0) || !anchor.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("line needs a finite anchor and nonzero direction"));
        }
        Ok(Self { anchor, direction: [direction[0] / norm, direction[1] / norm] })
    }

    pub fn through(p: Point2, q: Point2) -> Result<Self> {
        Self::new(p, [q[0] - p[0], q[1] - p[1]])
    }

    pub fn anchor(&self) -> Point2 {
        self.anchor
    }

    pub fn direction(&self) -> Point2 {
        self.direction
    }

    pub fn translated(&self, offset: Point2) -> Self {
        Self { anchor: [self.anchor[0] + offset[0], self.anchor[1] + offset[1]], direction: self.direction }
    }
}
