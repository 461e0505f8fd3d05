//! Filtered complexes: flag complexes on distance matrices and cubical
//! grids on masks.
//!
//! Both kinds lower to a [`BoundaryMatrix`] whose columns follow the
//! filtration order, which is what the reduction in
//! [`crate::persistence`] consumes.

mod cubical;
mod rips;

pub use cubical::{cubical_complex, CubicalFunction, FilteredCubicalGrid};
pub use rips::{rips_complex, weighted_edge_value, weighted_rips_complex, RipsOptions, RIPS_SIZE_GUARD};

use std::cmp::Ordering;
use std::fmt::Write as _;

/// Anything that can be lowered to a filtration-ordered boundary matrix.
pub trait Filtration {
    fn boundary_matrix(&self) -> BoundaryMatrix;
}

/// Z/2 boundary matrix in compressed column form.
///
/// Column `j` is the `j`-th cell in filtration order; its entries are the
/// strictly smaller, ascending indices of its facets.
#[derive(Clone, Debug, Default)]
pub struct BoundaryMatrix {
    dims: Vec<u8>,
    values: Vec<f64>,
    offsets: Vec<usize>,
    entries: Vec<u32>,
}

impl BoundaryMatrix {
    pub fn with_capacity(columns: usize, entries: usize) -> Self {
        let mut offsets = Vec::with_capacity(columns + 1);
        offsets.push(0);
        Self {
            dims: Vec::with_capacity(columns),
            values: Vec::with_capacity(columns),
            offsets,
            entries: Vec::with_capacity(entries),
        }
    }

    /// Appends a column. Facets need not be sorted.
    pub fn push(&mut self, dim: u8, value: f64, facets: &[u32]) {
        if self.offsets.is_empty() {
            self.offsets.push(0);
        }
        let start = self.entries.len();
        self.entries.extend_from_slice(facets);
        self.entries[start..].sort_unstable();
        self.dims.push(dim);
        self.values.push(value);
        self.offsets.push(self.entries.len());
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    #[inline]
    pub fn dim(&self, j: usize) -> u8 {
        self.dims[j]
    }

    #[inline]
    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[u32] {
        &self.entries[self.offsets[j]..self.offsets[j + 1]]
    }

    pub fn dims(&self) -> &[u8] {
        &self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Checks that facets precede their cofaces, carry matching dimension,
    /// and have no larger value.
    pub fn validate(&self) -> std::result::Result<(), String> {
        for j in 0..self.len() {
            let col = self.column(j);
            let expected = if self.dims[j] == 0 { 0 } else { self.dims[j] as usize + 1 };
            if col.len() != expected && !(self.dims[j] == 2 && col.len() == 4) {
                return Err(format!("column {j} has {} facets", col.len()));
            }
            for &i in col {
                let i = i as usize;
                if i >= j {
                    return Err(format!("column {j} has facet {i} at or after itself"));
                }
                if self.dims[i] + 1 != self.dims[j] {
                    return Err(format!("column {j} has facet {i} of wrong dimension"));
                }
                if self.values[i] > self.values[j] {
                    return Err(format!("facet {i} enters after its coface {j}"));
                }
            }
        }
        Ok(())
    }
}

/// A simplex with ascending vertices; unused vertex slots are `u32::MAX`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Simplex {
    pub vertices: [u32; 3],
    pub dim: u8,
    pub value: f64,
}

impl Simplex {
    pub fn vertex(v: u32, value: f64) -> Self {
        Self { vertices: [v, u32::MAX, u32::MAX], dim: 0, value }
    }

    pub fn edge(a: u32, b: u32, value: f64) -> Self {
        Self { vertices: [a.min(b), a.max(b), u32::MAX], dim: 1, value }
    }

    pub fn triangle(mut v: [u32; 3], value: f64) -> Self {
        v.sort_unstable();
        Self { vertices: v, dim: 2, value }
    }

    pub fn vertex_slice(&self) -> &[u32] {
        &self.vertices[..=self.dim as usize]
    }

    fn filtration_cmp(&self, other: &Self) -> Ordering {
        self.value.total_cmp(&other.value).then(self.dim.cmp(&other.dim)).then(self.vertices.cmp(&other.vertices))
    }
}

/// Simplices of dimension at most two in filtration order: by value, then
/// dimension, then lexicographic vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredComplex {
    n_vertices: usize,
    simplices: Vec<Simplex>,
}

impl FilteredComplex {
    /// Sorts the simplices into filtration order. Faces are not checked
    /// here; see [`FilteredComplex::check`].
    pub fn from_simplices(n_vertices: usize, mut simplices: Vec<Simplex>) -> Self {
        simplices.sort_unstable_by(Simplex::filtration_cmp);
        Self { n_vertices, simplices }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn count_by_dim(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for s in &self.simplices {
            c[s.dim as usize] += 1;
        }
        c
    }

    /// Verifies closure under faces and monotone values.
    pub fn check(&self) -> std::result::Result<(), String> {
        self.boundary_matrix_checked().and_then(|m| m.validate())
    }

    fn boundary_matrix_checked(&self) -> std::result::Result<BoundaryMatrix, String> {
        let n = self.n_vertices;
        let mut vertex_index = vec![u32::MAX; n];
        let mut edge_index = std::collections::HashMap::new();
        let mut matrix = BoundaryMatrix::with_capacity(self.simplices.len(), 3 * self.simplices.len());
        for (j, s) in self.simplices.iter().enumerate() {
            let j = j as u32;
            let v = s.vertices;
            match s.dim {
                0 => {
                    vertex_index[v[0] as usize] = j;
                    matrix.push(0, s.value, &[]);
                }
                1 => {
                    let (a, b) = (vertex_index[v[0] as usize], vertex_index[v[1] as usize]);
                    if a == u32::MAX || b == u32::MAX {
                        return Err(format!("edge {v:?} precedes a vertex"));
                    }
                    edge_index.insert((v[0], v[1]), j);
                    matrix.push(1, s.value, &[a, b]);
                }
                _ => {
                    let mut facets = [0u32; 3];
                    for (slot, pair) in [(v[0], v[1]), (v[0], v[2]), (v[1], v[2])].iter().enumerate() {
                        facets[slot] =
                            *edge_index.get(pair).ok_or_else(|| format!("triangle {v:?} precedes edge {pair:?}"))?;
                    }
                    matrix.push(2, s.value, &facets);
                }
            }
        }
        Ok(matrix)
    }

    /// Debug dump as `dim,value,v0[,v1[,v2]]` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for s in &self.simplices {
            let _ = write!(out, "{},{}", s.dim, s.value);
            for v in s.vertex_slice() {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

impl Filtration for FilteredComplex {
    fn boundary_matrix(&self) -> BoundaryMatrix {
        let n = self.n_vertices;
        let mut vertex_index = vec![0u32; n];
        // Dense edge lookup; flag complexes here stay well under a few
        // thousand vertices.
        let mut edge_index = vec![u32::MAX; n * n];
        let counts = self.count_by_dim();
        let mut matrix = BoundaryMatrix::with_capacity(self.simplices.len(), 2 * counts[1] + 3 * counts[2]);
        for (j, s) in self.simplices.iter().enumerate() {
            let j = j as u32;
            let v = s.vertices.map(|x| x as usize);
            match s.dim {
                0 => {
                    vertex_index[v[0]] = j;
                    matrix.push(0, s.value, &[]);
                }
                1 => {
                    edge_index[v[0] * n + v[1]] = j;
                    matrix.push(1, s.value, &[vertex_index[v[0]], vertex_index[v[1]]]);
                }
                _ => {
                    let facets =
                        [edge_index[v[0] * n + v[1]], edge_index[v[0] * n + v[2]], edge_index[v[1] * n + v[2]]];
                    matrix.push(2, s.value, &facets);
                }
            }
        }
        matrix
    }
}

impl<T: Filtration + ?Sized> Filtration for &T {
    fn boundary_matrix(&self) -> BoundaryMatrix {
        (**self).boundary_matrix()
    }
}
