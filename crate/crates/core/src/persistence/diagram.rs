use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub dim: u8,
    pub birth: f64,
    /// `f64::INFINITY` for essential classes.
    pub death: f64,
}

impl Interval {
    pub fn new(dim: u8, birth: f64, death: f64) -> Self {
        Self { dim, birth, death }
    }

    pub fn lifespan(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_finite(&self) -> bool {
        self.death.is_finite()
    }
}

/// A multiset of intervals kept sorted by `(dim, birth, death)`, so that
/// equal multisets compare equal.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    intervals: Vec<Interval>,
}

impl PersistenceDiagram {
    pub fn new(mut intervals: Vec<Interval>) -> Result<Self> {
        for iv in &intervals {
            if iv.birth.is_nan() || iv.death.is_nan() || !iv.birth.is_finite() || iv.death < iv.birth {
                return Err(Error::invalid(format!("invalid interval {iv:?}")));
            }
        }
        intervals.sort_by(|a, b| a.dim.cmp(&b.dim).then(a.birth.total_cmp(&b.birth)).then(a.death.total_cmp(&b.death)));
        Ok(Self { intervals })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn in_dim(&self, dim: u8) -> impl Iterator<Item = &Interval> + '_ {
        self.intervals.iter().filter(move |iv| iv.dim == dim)
    }

    pub fn restricted(&self, dim: u8) -> Self {
        Self { intervals: self.in_dim(dim).copied().collect() }
    }

    /// Finite lifespans in one dimension, longest first.
    pub fn finite_lifespans(&self, dim: u8) -> Vec<f64> {
        let mut l: Vec<f64> = self.in_dim(dim).filter(|iv| iv.is_finite()).map(Interval::lifespan).collect();
        l.sort_by(|a, b| b.total_cmp(a));
        l
    }

    /// Number of intervals of `dim` alive at `r`, i.e. with `birth <= r < death`.
    pub fn betti_at(&self, dim: u8, r: f64) -> usize {
        self.in_dim(dim).filter(|iv| iv.birth <= r && r < iv.death).count()
    }

    /// Union of two diagrams as multisets.
    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        Self::new(all).expect("intervals already validated")
    }
}
