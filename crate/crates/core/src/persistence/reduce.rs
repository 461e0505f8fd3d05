//! Column reduction with clearing.
//!
//! Dimensions are reduced from the top down. When a column of dimension
//! `d` ends with pivot `i`, column `i` (dimension `d - 1`) is known to
//! reduce to zero and is skipped when its own dimension is processed.
//! Within one dimension, a pass ends early once every cell that could still
//! be killed has been paired: for edges that is `V - C` merges, for
//! triangles or squares `E - V + C` fillings, where `C` counts the connected
//! components of the whole complex.

use super::cohomology::reduce_cohomology;
use super::diagram::{Interval, PersistenceDiagram};
use crate::complex::{BoundaryMatrix, Filtration};

const NONE: u32 = u32::MAX;

/// Persistence pairs as `(birth column, death column)` plus unpaired
/// columns of reported dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Pairing {
    pub pairs: Vec<(u32, u32)>,
    pub essential: Vec<u32>,
}

/// Adds `other` to `col` over Z/2; both are ascending.
pub(super) fn add_into(col: &mut Vec<u32>, other: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < col.len() && j < other.len() {
        match col[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(col[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&col[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(col, scratch);
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Connected components of the full complex.
fn component_count(m: &BoundaryMatrix) -> usize {
    let mut parent: Vec<u32> = (0..m.len() as u32).collect();
    let mut components = 0usize;
    for j in 0..m.len() {
        match m.dim(j) {
            0 => components += 1,
            1 => {
                let c = m.column(j);
                let (a, b) = (find(&mut parent, c[0]), find(&mut parent, c[1]));
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                    components -= 1;
                }
            }
            _ => {}
        }
    }
    components
}

/// Reduces every column of dimension `1..=max_dim + 1` and reports the
/// pairing for homology up to `max_dim`.
pub fn reduce(m: &BoundaryMatrix, max_dim: usize) -> Pairing {
    let n = m.len();
    let top = (max_dim + 1).min(2) as u8;
    let mut counts = [0usize; 3];
    for &d in m.dims() {
        if (d as usize) < 3 {
            counts[d as usize] += 1;
        }
    }
    let components = component_count(m);
    let killable = |d: u8| -> usize {
        match d {
            1 => counts[0] - components,
            _ => counts[1] + components - counts[0],
        }
    };

    let mut cleared = vec![false; n];
    let mut pivot_owner = vec![NONE; n];
    let mut reduced: Vec<Vec<u32>> = Vec::new();
    let mut pairs = Vec::new();
    let mut scratch = Vec::new();

    for d in (1..=top).rev() {
        let budget = killable(d);
        let mut found = 0usize;
        if budget == 0 {
            continue;
        }
        for j in 0..n {
            if m.dim(j) != d || cleared[j] {
                continue;
            }
            let mut col = m.column(j).to_vec();
            while let Some(&low) = col.last() {
                let owner = pivot_owner[low as usize];
                if owner == NONE {
                    break;
                }
                add_into(&mut col, &reduced[owner as usize], &mut scratch);
            }
            if let Some(&low) = col.last() {
                pivot_owner[low as usize] = reduced.len() as u32;
                reduced.push(col);
                cleared[low as usize] = true;
                pairs.push((low, j as u32));
                found += 1;
                if found == budget {
                    break;
                }
            }
        }
    }

    let mut dead = vec![false; n];
    for &(b, d) in &pairs {
        dead[b as usize] = true;
        dead[d as usize] = true;
    }
    let essential = (0..n).filter(|&j| (m.dim(j) as usize) <= max_dim && !dead[j]).map(|j| j as u32).collect();
    pairs.sort_unstable();
    Pairing { pairs, essential }
}

/// Turns a pairing into intervals, dropping zero-length pairs.
pub fn diagram_from_pairing(m: &BoundaryMatrix, pairing: &Pairing, max_dim: usize) -> PersistenceDiagram {
    let mut intervals = Vec::new();
    for &(b, d) in &pairing.pairs {
        let (b, d) = (b as usize, d as usize);
        if (m.dim(b) as usize) > max_dim {
            continue;
        }
        let (birth, death) = (m.value(b), m.value(d));
        if death > birth {
            intervals.push(Interval::new(m.dim(b), birth, death));
        }
    }
    for &e in &pairing.essential {
        let e = e as usize;
        intervals.push(Interval::new(m.dim(e), m.value(e), f64::INFINITY));
    }
    PersistenceDiagram::new(intervals).expect("filtration values are ordered")
}

/// Which matrix to reduce.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReductionMethod {
    /// Boundary reduction for small complexes, coboundary reduction once
    /// the top dimension holds more than [`AUTO_COHOMOLOGY_CELLS`] cells.
    #[default]
    Auto,
    Homology,
    Cohomology,
}

pub const AUTO_COHOMOLOGY_CELLS: usize = 20_000;

/// Persistence diagram in degrees `0..=max_dim` (at most 1 is meaningful
/// for complexes capped at dimension 2).
pub fn compute_ph<F: Filtration + ?Sized>(cx: &F, max_dim: usize) -> PersistenceDiagram {
    compute_ph_with(cx, max_dim, ReductionMethod::Auto)
}

pub fn compute_ph_with<F: Filtration + ?Sized>(cx: &F, max_dim: usize, method: ReductionMethod) -> PersistenceDiagram {
    let m = cx.boundary_matrix();
    let top = (max_dim + 1) as u8;
    let method = match method {
        ReductionMethod::Auto if m.dims().iter().filter(|&&d| d == top).count() > AUTO_COHOMOLOGY_CELLS => {
            ReductionMethod::Cohomology
        }
        ReductionMethod::Auto => ReductionMethod::Homology,
        other => other,
    };
    let pairing = match method {
        ReductionMethod::Cohomology => reduce_cohomology(&m, max_dim),
        _ => reduce(&m, max_dim),
    };
    diagram_from_pairing(&m, &pairing, max_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{rips_complex, RipsOptions};
    use crate::geometry::{euclidean_distance_matrix, PointCloud};
    use std::f64::consts::SQRT_2;

    fn ph(points: &[[f64; 2]]) -> PersistenceDiagram {
        let m = euclidean_distance_matrix(&PointCloud::from_2d(points).unwrap());
        compute_ph(&rips_complex(&m, RipsOptions::default()).unwrap(), 1)
    }

    #[test]
    fn square_has_one_loop() {
        let pd = ph(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let h1: Vec<_> = pd.in_dim(1).copied().collect();
        assert_eq!(h1, vec![Interval::new(1, 1.0, SQRT_2)]);
        assert_eq!(pd.restricted(0).len(), 4);
    }

    #[test]
    fn single_vertex_and_pair() {
        let pd = ph(&[[0.0, 0.0]]);
        assert_eq!(pd.intervals(), &[Interval::new(0, 0.0, f64::INFINITY)]);
        let pd = ph(&[[0.0, 0.0], [2.0, 0.0]]);
        assert_eq!(pd.intervals(), &[Interval::new(0, 0.0, 2.0), Interval::new(0, 0.0, f64::INFINITY)]);
    }

    #[test]
    fn xor_merge() {
        let mut a = vec![1, 3, 5];
        let mut s = Vec::new();
        add_into(&mut a, &[3, 4, 5, 9], &mut s);
        assert_eq!(a, vec![1, 4, 9]);
    }
}
