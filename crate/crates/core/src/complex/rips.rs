use serde::{Deserialize, Serialize};

use super::{FilteredComplex, Simplex};
use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;

/// Largest vertex count accepted for two-dimensional flag complexes
/// unless `force` is set.
pub const RIPS_SIZE_GUARD: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RipsOptions {
    /// Highest simplex dimension, at most 2.
    pub max_dim: usize,
    /// Largest filtration value kept; `None` keeps the full filtration.
    pub r_max: Option<f64>,
    /// Lifts the size guard.
    pub force: bool,
}

impl Default for RipsOptions {
    fn default() -> Self {
        Self { max_dim: 2, r_max: None, force: false }
    }
}

impl RipsOptions {
    pub fn with_max_dim(max_dim: usize) -> Self {
        Self { max_dim, ..Self::default() }
    }
}

/// Edge value of the distance-to-measure weighted flag complex: the radius
/// at which balls of radius `r - f(u)` and `r - f(v)` first meet.
#[inline]
pub fn weighted_edge_value(fu: f64, fv: f64, d: f64) -> f64 {
    if d <= (fu - fv).abs() {
        fu.max(fv)
    } else {
        (fu + fv + d) / 2.0
    }
}

fn build(
    n: usize,
    opts: &RipsOptions,
    vertex_value: impl Fn(usize) -> f64,
    edge_value: impl Fn(usize, usize) -> f64,
) -> Result<FilteredComplex> {
    if n == 0 {
        return Err(Error::invalid("flag complex needs at least one vertex"));
    }
    if opts.max_dim > 2 {
        return Err(Error::invalid(format!("max_dim {} exceeds 2", opts.max_dim)));
    }
    if opts.max_dim == 2 && n > RIPS_SIZE_GUARD && !opts.force {
        return Err(Error::TooLarge(format!(
            "{n} vertices exceed the two-dimensional flag complex guard of {RIPS_SIZE_GUARD}"
        )));
    }
    let r_max = opts.r_max.unwrap_or(f64::INFINITY);
    if r_max.is_nan() || r_max <= 0.0 {
        return Err(Error::invalid(format!("r_max must be positive, got {r_max}")));
    }

    let mut edges = vec![f64::NAN; n * n];
    let mut simplices = Vec::with_capacity(n + n * (n - 1) / 2);
    for v in 0..n {
        let f = vertex_value(v);
        if f <= r_max {
            simplices.push(Simplex::vertex(v as u32, f));
        }
    }
    if opts.max_dim >= 1 {
        for i in 0..n {
            for j in i + 1..n {
                let e = edge_value(i, j);
                if e <= r_max && vertex_value(i) <= r_max && vertex_value(j) <= r_max {
                    edges[i * n + j] = e;
                    simplices.push(Simplex::edge(i as u32, j as u32, e));
                }
            }
        }
    }
    if opts.max_dim >= 2 {
        for i in 0..n {
            for j in i + 1..n {
                let eij = edges[i * n + j];
                if eij.is_nan() {
                    continue;
                }
                for k in j + 1..n {
                    let (eik, ejk) = (edges[i * n + k], edges[j * n + k]);
                    if eik.is_nan() || ejk.is_nan() {
                        continue;
                    }
                    let t = eij.max(eik).max(ejk);
                    simplices.push(Simplex::triangle([i as u32, j as u32, k as u32], t));
                }
            }
        }
    }
    Ok(FilteredComplex::from_simplices(n, simplices))
}

/// Vietoris-Rips flag complex: vertices at 0, edges at their length,
/// triangles at their longest edge.
pub fn rips_complex(matrix: &DistanceMatrix, opts: RipsOptions) -> Result<FilteredComplex> {
    let r_max = opts.r_max.or(Some(matrix.max_entry().max(f64::MIN_POSITIVE)));
    build(matrix.len(), &RipsOptions { r_max, ..opts }, |_| 0.0, |i, j| matrix.get(i, j))
}

/// Weighted flag complex: vertex `v` at `f(v)`, edges by
/// [`weighted_edge_value`], triangles at their latest edge.
pub fn weighted_rips_complex(
    matrix: &DistanceMatrix,
    vertex_values: &[f64],
    opts: RipsOptions,
) -> Result<FilteredComplex> {
    if vertex_values.len() != matrix.len() {
        return Err(Error::invalid(format!("{} vertex values for {} points", vertex_values.len(), matrix.len())));
    }
    if let Some(v) = vertex_values.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite vertex value {v}")));
    }
    build(
        matrix.len(),
        &opts,
        |v| vertex_values[v],
        |i, j| weighted_edge_value(vertex_values[i], vertex_values[j], matrix.get(i, j)),
    )
}
