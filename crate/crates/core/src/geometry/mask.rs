use serde::{Deserialize, Serialize};

use super::polygon::{convex_hull, point_in_polygon, polygon_area, Polygon};
use super::{Point2, PointCloud};
use crate::error::{Error, Result};

/// A square occupancy grid placed on a physical square.
///
/// Cells are stored row-major with row 0 at the bottom (smallest y); cell
/// `(col, row)` covers `[x0 + col w, x0 + (col + 1) w] x [y0 + row w, ...]`
/// where `w = width / side`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryMask {
    side: usize,
    cells: Vec<bool>,
    origin: Point2,
    width: f64,
}

impl BinaryMask {
    pub fn new(side: usize, cells: Vec<bool>, origin: Point2, width: f64) -> Result<Self> {
        if side < 2 {
            return Err(Error::invalid(format!("mask side must be at least 2, got {side}")));
        }
        if cells.len() != side * side {
            return Err(Error::invalid(format!("expected {} cells, got {}", side * side, cells.len())));
        }
        if !(width.is_finite() && width > 0.0) || !origin.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("mask extent must be finite with positive width"));
        }
        Ok(Self { side, cells, origin, width })
    }

    /// A mask whose cells are unit squares with the origin at zero.
    pub fn from_cells(side: usize, cells: Vec<bool>) -> Result<Self> {
        Self::new(side, cells, [0.0, 0.0], side as f64)
    }

    /// Builds a mask from rows listed top to bottom, as they would be drawn.
    pub fn from_rows_top_down(rows: &[Vec<bool>]) -> Result<Self> {
        let side = rows.len();
        if rows.iter().any(|r| r.len() != side) {
            return Err(Error::invalid("mask rows must form a square grid"));
        }
        let cells = rows.iter().rev().flatten().copied().collect();
        Self::from_cells(side, cells)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn cell_width(&self) -> f64 {
        self.width / self.side as f64
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> bool {
        self.cells[row * self.side + col]
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point2 {
        let w = self.cell_width();
        [self.origin[0] + (col as f64 + 0.5) * w, self.origin[1] + (row as f64 + 0.5) * w]
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Number of connected pieces, with cells touching at a corner counted
    /// as connected.
    pub fn component_count(&self) -> usize {
        let side = self.side;
        let mut seen = vec![false; self.cells.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.cells.len() {
            if !self.cells[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(i) = stack.pop() {
                let (c, r) = ((i % side) as isize, (i / side) as isize);
                for dr in -1..=1 {
                    for dc in -1..=1 {
                        let (nc, nr) = (c + dc, r + dr);
                        if nc < 0 || nr < 0 || nc >= side as isize || nr >= side as isize {
                            continue;
                        }
                        let j = nr as usize * side + nc as usize;
                        if self.cells[j] && !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        count
    }

    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let side = self.side;
        self.cells.iter().enumerate().filter(|(_, &c)| c).map(move |(i, _)| (i % side, i / side))
    }

    pub fn occupied_centers(&self) -> Vec<Point2> {
        self.occupied().map(|(c, r)| self.cell_center(c, r)).collect()
    }

    /// Bounding box `(min, max)` of the occupied cell centers.
    pub fn occupied_bounds(&self) -> Option<(Point2, Point2)> {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let mut any = false;
        for p in self.occupied_centers() {
            any = true;
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        any.then_some((lo, hi))
    }

    /// The same cells placed on a different physical square.
    pub fn with_extent(&self, origin: Point2, width: f64) -> Result<Self> {
        Self::new(self.side, self.cells.clone(), origin, width)
    }
}

pub enum RasterSource<'a> {
    Cloud(&'a PointCloud),
    Polygon(&'a Polygon),
}

/// Square extent around a bounding box: the longer side sets the width and
/// the shorter axis is centered.
fn square_extent(lo: Point2, hi: Point2) -> (Point2, f64) {
    let (dx, dy) = (hi[0] - lo[0], hi[1] - lo[1]);
    let mut width = dx.max(dy);
    if width <= 0.0 {
        width = 1.0;
    }
    ([lo[0] - (width - dx) / 2.0, lo[1] - (width - dy) / 2.0], width)
}

/// Rasterizes onto a `side x side` grid over the tight bounding box padded
/// to a square. A cloud occupies every cell containing one of its points; a
/// polygon occupies every cell whose center it contains.
pub fn rasterize(source: RasterSource<'_>, side: usize) -> Result<BinaryMask> {
    if side < 2 {
        return Err(Error::invalid(format!("mask side must be at least 2, got {side}")));
    }
    match source {
        RasterSource::Cloud(cloud) => {
            if cloud.dim() != 2 {
                return Err(Error::invalid("only planar clouds can be rasterized"));
            }
            let (lo, hi) = cloud.bounds();
            let (origin, width) = square_extent([lo[0], lo[1]], [hi[0], hi[1]]);
            let mut cells = vec![false; side * side];
            let scale = side as f64 / width;
            let index = |v: f64, o: f64| (((v - o) * scale).floor().max(0.0) as usize).min(side - 1);
            for p in cloud.points() {
                cells[index(p[1], origin[1]) * side + index(p[0], origin[0])] = true;
            }
            BinaryMask::new(side, cells, origin, width)
        }
        RasterSource::Polygon(polygon) => {
            let (lo, hi) = polygon.bounds();
            let (origin, width) = square_extent(lo, hi);
            let mut mask = BinaryMask::new(side, vec![false; side * side], origin, width)?;
            for row in 0..side {
                for col in 0..side {
                    let c = mask.cell_center(col, row);
                    mask.cells[row * side + col] = point_in_polygon(c, polygon);
                }
            }
            Ok(mask)
        }
    }
}

/// Occupied area over the area of the convex hull of the occupied cell
/// centers, clamped to at most one.
pub fn convexity_measure(mask: &BinaryMask) -> Result<f64> {
    let centers = mask.occupied_centers();
    let hull =
        convex_hull(&centers).map_err(|e| Error::Degenerate(format!("mask has no two-dimensional hull: {e}")))?;
    let w = mask.cell_width();
    let ratio = centers.len() as f64 * w * w / polygon_area(&hull);
    Ok(ratio.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_neighbours_share_a_component() {
        let rows = |r: &[&str]| r.iter().map(|s| s.chars().map(|c| c == '#').collect()).collect::<Vec<Vec<bool>>>();
        assert_eq!(BinaryMask::from_rows_top_down(&rows(&["#..", ".#.", "..#"])).unwrap().component_count(), 1);
        assert_eq!(BinaryMask::from_rows_top_down(&rows(&["#.#", "...", "#.#"])).unwrap().component_count(), 4);
        assert_eq!(BinaryMask::from_rows_top_down(&rows(&["...", "...", "..."])).unwrap().component_count(), 0);
    }

    #[test]
    fn corner_cell_centers_fill_a_two_by_two_grid() {
        let cloud = PointCloud::from_2d(&[[0.5, 0.5], [1.5, 0.5], [0.5, 1.5], [1.5, 1.5]]).unwrap();
        let mask = rasterize(RasterSource::Cloud(&cloud), 2).unwrap();
        assert_eq!(mask.occupied_count(), 4);
    }

    #[test]
    fn full_polygon_fills_every_cell() {
        let sq = Polygon::new(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]).unwrap();
        let mask = rasterize(RasterSource::Polygon(&sq), 7).unwrap();
        assert_eq!(mask.occupied_count(), 49);
        assert_eq!(convexity_measure(&mask).unwrap(), 1.0);
    }

    #[test]
    fn l_shape_occupancy_tracks_area() {
        let l = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.4], [0.4, 0.4], [0.4, 1.0], [0.0, 1.0]]).unwrap();
        let mask = rasterize(RasterSource::Polygon(&l), 20).unwrap();
        let ratio = mask.occupied_count() as f64 / 400.0;
        let analytic = polygon_area(&l) / 1.0;
        assert!((ratio - analytic).abs() <= 0.05 * analytic, "{ratio} vs {analytic}");
    }

    #[test]
    fn rectangle_is_centered_on_its_square() {
        let rect = Polygon::new(vec![[0.0, 0.0], [4.0, 0.0], [4.0, 2.0], [0.0, 2.0]]).unwrap();
        let mask = rasterize(RasterSource::Polygon(&rect), 4).unwrap();
        assert_eq!(mask.origin(), [0.0, -1.0]);
        assert_eq!(mask.width(), 4.0);
        let rows: Vec<bool> = (0..4).map(|r| mask.get(0, r)).collect();
        assert_eq!(rows, vec![false, true, true, false]);
    }

    #[test]
    fn three_quadrant_mask_measure() {
        // 40x40 grid with the top-right 20x20 quadrant empty. The hull of
        // the occupied centers is the 39x39 center square minus the
        // triangle cut off between (19.5, 39.5) and (39.5, 19.5).
        let side = 40;
        let cells: Vec<bool> = (0..side * side).map(|i| !(i % side >= 20 && i / side >= 20)).collect();
        let mask = BinaryMask::from_cells(side, cells).unwrap();
        let want = 1200.0 / (39.0 * 39.0 - 20.0 * 20.0 / 2.0);
        assert!((convexity_measure(&mask).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn collinear_mask_is_degenerate() {
        let mut cells = vec![false; 16];
        cells[0] = true;
        cells[1] = true;
        cells[2] = true;
        let mask = BinaryMask::from_cells(4, cells).unwrap();
        assert!(matches!(convexity_measure(&mask), Err(Error::Degenerate(_))));
    }
}
