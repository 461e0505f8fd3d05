//! Reduction of the coboundary matrix.
//!
//! Columns are cells of dimension `d`, rows their cofacets, processed in
//! reverse filtration order with the earliest cofacet as pivot. The pairs
//! coincide with those of the boundary reduction, but for flag complexes
//! almost every edge column finishes after zero or a few additions, while
//! the boundary reduction spends most of its time zeroing positive
//! triangles. Clearing runs upward: a cell that was the pivot of a
//! `(d - 1)`-column is skipped in dimension `d`.

use super::reduce::{add_into, Pairing};
use crate::complex::BoundaryMatrix;

const NONE: u32 = u32::MAX;

/// Cofacet lists for cells of dimension at most `max_dim`, ascending.
fn coboundaries(m: &BoundaryMatrix, max_dim: usize) -> (Vec<usize>, Vec<u32>) {
    let n = m.len();
    let mut degree = vec![0usize; n + 1];
    for j in 0..n {
        if (m.dim(j) as usize) <= max_dim + 1 && m.dim(j) > 0 {
            for &i in m.column(j) {
                degree[i as usize + 1] += 1;
            }
        }
    }
    for i in 0..n {
        degree[i + 1] += degree[i];
    }
    let offsets = degree;
    let mut fill = offsets.clone();
    let mut entries = vec![0u32; offsets[n]];
    for j in 0..n {
        if (m.dim(j) as usize) <= max_dim + 1 && m.dim(j) > 0 {
            for &i in m.column(j) {
                entries[fill[i as usize]] = j as u32;
                fill[i as usize] += 1;
            }
        }
    }
    (offsets, entries)
}

/// Pairing from the coboundary reduction; same contract as
/// [`super::reduce`]. Columns hold bitwise-complemented indices so that the
/// ascending merge keeps the earliest cofacet last.
pub fn reduce_cohomology(m: &BoundaryMatrix, max_dim: usize) -> Pairing {
    let n = m.len();
    let (offsets, entries) = coboundaries(m, max_dim);
    let mut cleared = vec![false; n];
    let mut is_pivot = vec![false; n];
    let mut pivot_owner = vec![NONE; n];
    let mut reduced: Vec<Vec<u32>> = Vec::new();
    let mut pairs = Vec::new();
    let mut essential = Vec::new();
    let mut scratch = Vec::new();

    for d in 0..=max_dim.min(1) as u8 {
        for j in (0..n).rev() {
            if m.dim(j) != d || cleared[j] {
                continue;
            }
            let mut col: Vec<u32> = entries[offsets[j]..offsets[j + 1]].iter().rev().map(|&x| !x).collect();
            while let Some(&low) = col.last() {
                let owner = pivot_owner[!low as usize];
                if owner == NONE {
                    break;
                }
                add_into(&mut col, &reduced[owner as usize], &mut scratch);
            }
            match col.last() {
                Some(&low) => {
                    let death = !low;
                    pivot_owner[death as usize] = reduced.len() as u32;
                    reduced.push(col);
                    is_pivot[death as usize] = true;
                    cleared[death as usize] = true;
                    pairs.push((j as u32, death));
                }
                None => {
                    if !is_pivot[j] {
                        essential.push(j as u32);
                    }
                }
            }
        }
    }
    pairs.sort_unstable();
    essential.sort_unstable();
    Pairing { pairs, essential }
}
