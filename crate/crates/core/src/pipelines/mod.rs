//! End-to-end experiments: datasets in, reports out.
//!
//! Per-item persistence runs in parallel on a pool of `jobs` threads and is
//! collected in item order, so reports do not depend on the thread count.

mod convexity;
mod curvature;
mod holes;
mod select;

pub use convexity::{
    concavity_features, convexity_pipeline, convexity_regression, convexity_scalar, default_lines, extended_lines,
    ConvexityConfig, LineChoice, LineSet, RegressionConfig, FALLBACK_THRESHOLD_CELLS, LIFESPAN_FLOOR_CELLS,
};
pub use curvature::{curvature_diagram, curvature_pipeline, CurvaturePipelineConfig, CurvatureVariant};
pub use holes::{holes_diagram, holes_pipeline, HolesConfig};
pub use select::{select_model, FittedPredictor, Selection, SignatureChoice};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Duration;

use crate::error::{Error, Result};
use crate::learn::Metric;
use crate::rng::{derive_seed, rng_from_seed, stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeResult {
    pub name: String,
    pub metric: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItemPrediction {
    /// `regime/index`, the index counting items of the evaluated set.
    pub id: String,
    pub label: f64,
    pub prediction: f64,
}

/// Result of one experiment run. Wall time is kept out of the serialized
/// form so that reruns produce identical files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub regimes: Vec<RegimeResult>,
    pub items: Vec<ItemPrediction>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ExperimentReport {
    pub fn regime(&self, name: &str) -> Option<f64> {
        self.regimes.iter().find(|r| r.name == name).map(|r| r.value)
    }

    /// Fixed-width table of the regimes.
    pub fn summary(&self) -> String {
        let width = self.regimes.iter().map(|r| r.name.len()).max().unwrap_or(6).max(6);
        let mut out = format!("{}\n", self.experiment);
        for r in &self.regimes {
            out.push_str(&format!("  {:<width$}  {:>8}  {:.4}\n", r.name, r.metric, r.value));
        }
        out
    }

    fn push_regime(&mut self, name: &str, metric: Metric, value: f64) {
        let metric = match metric {
            Metric::Accuracy => "accuracy",
            Metric::Mse => "mse",
        };
        self.regimes.push(RegimeResult { name: name.into(), metric: metric.into(), value });
    }

    fn push_items(&mut self, regime: &str, labels: &[f64], preds: &[f64]) {
        for (i, (&label, &prediction)) in labels.iter().zip(preds).enumerate() {
            self.items.push(ItemPrediction { id: format!("{regime}/{i}"), label, prediction });
        }
    }
}

/// Maps `f` over `items` on `jobs` threads (0 picks the core count),
/// keeping item order.
pub fn par_map<T, R, F>(jobs: usize, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start {jobs} worker threads: {e}")))?;
    pool.install(|| items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect())
}

/// Random split with `round(train_fraction n)` training items; with
/// `stratify`, every label value is split in that proportion.
pub fn train_test_split(
    labels: &[f64],
    train_fraction: f64,
    seed: u64,
    stratify: bool,
) -> Result<(Vec<usize>, Vec<usize>)> {
    use rand::seq::SliceRandom;
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!("train fraction {train_fraction} must lie in (0, 1)")));
    }
    let mut rng = rng_from_seed(derive_seed(seed, stream::SPLIT, 0));
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.shuffle(&mut rng);
    let groups: Vec<Vec<usize>> = if stratify {
        let mut classes: Vec<f64> = labels.to_vec();
        classes.sort_by(f64::total_cmp);
        classes.dedup();
        classes.iter().map(|c| order.iter().copied().filter(|&i| labels[i] == *c).collect()).collect()
    } else {
        vec![order]
    };
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for g in groups {
        let cut = (train_fraction * g.len() as f64).round() as usize;
        train.extend_from_slice(&g[..cut]);
        test.extend_from_slice(&g[cut..]);
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::invalid("split leaves an empty side"));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}
