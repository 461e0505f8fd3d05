//! Textbook reduction used as a test oracle.

use super::diagram::{Interval, PersistenceDiagram};
use crate::complex::Filtration;
use crate::error::{Error, Result};

pub const ORACLE_SIZE_LIMIT: usize = 6000;

/// Dense left-to-right reduction without clearing or compression: while an
/// earlier column shares the lowest one of column `j`, add it to `j`.
pub fn naive_reduction_oracle<F: Filtration + ?Sized>(cx: &F, max_dim: usize) -> Result<PersistenceDiagram> {
    let m = cx.boundary_matrix();
    let n = m.len();
    if n > ORACLE_SIZE_LIMIT {
        return Err(Error::TooLarge(format!("{n} cells exceed the oracle limit of {ORACLE_SIZE_LIMIT}")));
    }
    let mut cols: Vec<Vec<bool>> = (0..n)
        .map(|j| {
            let mut c = vec![false; n];
            if (m.dim(j) as usize) <= max_dim + 1 {
                for &i in m.column(j) {
                    c[i as usize] = true;
                }
            }
            c
        })
        .collect();
    let low = |c: &[bool]| c.iter().rposition(|&x| x);
    // owner[i] is the reduced column whose lowest one is row i
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for j in 0..n {
        while let Some(l) = low(&cols[j]) {
            let Some(k) = owner[l] else {
                owner[l] = Some(j);
                break;
            };
            let (head, tail) = cols.split_at_mut(j);
            for (x, &y) in tail[0].iter_mut().zip(&head[k]) {
                *x ^= y;
            }
        }
    }
    let mut is_birth = vec![false; n];
    let mut intervals = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        if let Some(i) = low(col) {
            is_birth[i] = true;
            if (m.dim(i) as usize) <= max_dim && m.value(j) > m.value(i) {
                intervals.push(Interval::new(m.dim(i), m.value(i), m.value(j)));
            }
        }
    }
    for (j, col) in cols.iter().enumerate() {
        if (m.dim(j) as usize) <= max_dim && !is_birth[j] && low(col).is_none() {
            intervals.push(Interval::new(m.dim(j), m.value(j), f64::INFINITY));
        }
    }
    PersistenceDiagram::new(intervals)
}
