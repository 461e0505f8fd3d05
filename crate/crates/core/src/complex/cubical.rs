use serde::{Deserialize, Serialize};

use super::{BoundaryMatrix, Filtration};
use crate::error::{Error, Result};
use crate::geometry::{absolute_height, height, tubular_distance, BinaryMask, Line, Point2};

/// Function evaluated at occupied cell centers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CubicalFunction {
    /// Distance to a line.
    Tubular(Line),
    /// `x . v` for a unit vector `v`.
    Height(Point2),
    /// `|x . v|` for a unit vector `v`.
    AbsoluteHeight(Point2),
}

impl CubicalFunction {
    fn validate(&self) -> Result<()> {
        match self {
            CubicalFunction::Tubular(_) => Ok(()),
            CubicalFunction::Height(v) | CubicalFunction::AbsoluteHeight(v) => {
                if (v[0].hypot(v[1]) - 1.0).abs() > 1e-9 {
                    Err(Error::invalid(format!("height direction {v:?} is not a unit vector")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn eval(&self, p: Point2) -> f64 {
        match self {
            CubicalFunction::Tubular(line) => tubular_distance(p, line),
            CubicalFunction::Height(v) => height(&p, v),
            CubicalFunction::AbsoluteHeight(v) => absolute_height(&p, v),
        }
    }
}

/// Cubical grid filtered by its top cells. Unoccupied top cells carry
/// `+inf` and never enter; every lower cell takes the minimum value of its
/// incident top cells, so diagonal neighbors meet at their shared vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredCubicalGrid {
    side: usize,
    top: Vec<f64>,
}

impl FilteredCubicalGrid {
    /// `top` is row-major with row 0 at the bottom; `NaN` is rejected.
    pub fn new(side: usize, top: Vec<f64>) -> Result<Self> {
        if side == 0 || top.len() != side * side {
            return Err(Error::invalid("cubical grid needs side*side top values"));
        }
        if top.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::invalid("top-cell values must be finite or +inf"));
        }
        Ok(Self { side, top })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn top_value(&self, col: usize, row: usize) -> f64 {
        self.top[row * self.side + col]
    }

    pub fn top_values(&self) -> &[f64] {
        &self.top
    }

    /// Value of the cell at doubled coordinates `(x, y)`, `0 <= x, y <= 2 side`.
    /// Odd coordinates run along top cells, even ones along grid lines.
    pub fn cell_value(&self, x: usize, y: usize) -> f64 {
        let mut v = f64::INFINITY;
        for r in self.incident(y) {
            for c in self.incident(x) {
                v = v.min(self.top_value(c, r));
            }
        }
        v
    }

    /// Top-cell indices along one axis touching doubled coordinate `t`.
    fn incident(&self, t: usize) -> std::ops::Range<usize> {
        let k = t / 2;
        if t % 2 == 1 {
            k..k + 1
        } else {
            k.saturating_sub(1)..(k + 1).min(self.side)
        }
    }
}

impl Filtration for FilteredCubicalGrid {
    fn boundary_matrix(&self) -> BoundaryMatrix {
        let s = 2 * self.side + 1;
        let mut cells: Vec<(f64, u8, u32)> = Vec::new();
        for y in 0..s {
            for x in 0..s {
                let v = self.cell_value(x, y);
                if v.is_finite() {
                    let dim = (x % 2 + y % 2) as u8;
                    cells.push((v, dim, (y * s + x) as u32));
                }
            }
        }
        cells.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut index = vec![u32::MAX; s * s];
        let mut matrix = BoundaryMatrix::with_capacity(cells.len(), 4 * cells.len());
        for (j, &(v, dim, id)) in cells.iter().enumerate() {
            let (x, y) = (id as usize % s, id as usize / s);
            let facets: Vec<usize> = match (x % 2, y % 2) {
                (0, 0) => vec![],
                (1, 0) => vec![id as usize - 1, id as usize + 1],
                (0, 1) => vec![id as usize - s, id as usize + s],
                _ => vec![id as usize - 1, id as usize + 1, id as usize - s, id as usize + s],
            };
            let cols: Vec<u32> = facets.iter().map(|&f| index[f]).collect();
            debug_assert!(cols.iter().all(|&c| c != u32::MAX));
            matrix.push(dim, v, &cols);
            index[id as usize] = j as u32;
        }
        matrix
    }
}

/// Cubical grid of a mask with occupied top cells valued by `function` at
/// their centers.
pub fn cubical_complex(mask: &BinaryMask, function: CubicalFunction) -> Result<FilteredCubicalGrid> {
    function.validate()?;
    let side = mask.side();
    let mut top = vec![f64::INFINITY; side * side];
    for (col, row) in mask.occupied() {
        top[row * side + col] = function.eval(mask.cell_center(col, row));
    }
    FilteredCubicalGrid::new(side, top)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(rows: &[&str]) -> BinaryMask {
        let rows: Vec<Vec<bool>> = rows.iter().map(|r| r.chars().map(|c| c == '#').collect()).collect();
        BinaryMask::from_rows_top_down(&rows).unwrap()
    }

    fn bottom_line() -> Line {
        Line::new([0.0, 0.0], [1.0, 0.0]).unwrap()
    }

    #[test]
    fn bottom_row_enters_first() {
        let g = cubical_complex(&mask(&["##", "##"]), CubicalFunction::Tubular(bottom_line())).unwrap();
        assert_eq!(g.top_value(0, 0), 0.5);
        assert_eq!(g.top_value(1, 1), 1.5);
        assert!(g.top_value(0, 0) < g.top_value(0, 1));
    }

    #[test]
    fn single_cell_faces_inherit_its_value() {
        let g = cubical_complex(&mask(&["..", "#."]), CubicalFunction::Height([0.0, 1.0])).unwrap();
        let m = g.boundary_matrix();
        m.validate().unwrap();
        assert_eq!(m.len(), 9);
        assert_eq!(m.dims().iter().filter(|&&d| d == 0).count(), 4);
        assert_eq!(m.dims().iter().filter(|&&d| d == 1).count(), 4);
        assert!(m.values().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn lower_cells_take_the_minimum() {
        let g = FilteredCubicalGrid::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        // center vertex touches all four
        assert_eq!(g.cell_value(2, 2), 1.0);
        // vertical edge between top-left (3) and top-right (4)
        assert_eq!(g.cell_value(2, 3), 3.0);
        // outer corner of the top-right cell
        assert_eq!(g.cell_value(4, 4), 4.0);
        assert_eq!(g.cell_value(3, 3), 4.0);
        let m = g.boundary_matrix();
        m.validate().unwrap();
        assert_eq!(m.len(), 25);
    }

    #[test]
    fn diagonal_cells_share_a_vertex() {
        let g = FilteredCubicalGrid::new(2, vec![1.0, f64::INFINITY, f64::INFINITY, 2.0]).unwrap();
        assert_eq!(g.cell_value(2, 2), 1.0);
        let m = g.boundary_matrix();
        m.validate().unwrap();
        // two squares, 8 edges, 7 vertices
        assert_eq!(m.len(), 17);
    }

    #[test]
    fn rejects_non_unit_direction() {
        assert!(cubical_complex(&mask(&["#.", ".."]), CubicalFunction::Height([0.0, 2.0])).is_err());
    }
}
