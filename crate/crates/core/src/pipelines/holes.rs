use serde::{Deserialize, Serialize};
use serde_json::json;
use std::time::Instant;

use super::{par_map, select_model, train_test_split, ExperimentReport, SignatureChoice};
use crate::complex::{weighted_rips_complex, RipsOptions};
use crate::datagen::LabeledDataset;
use crate::error::Result;
use crate::geometry::{
    apply_transform, dtm_subset, euclidean_distance_matrix, farthest_point_indices, PointCloud, TransformKind,
    TransformSpec,
};
use crate::learn::{accuracy, KnnMode, Metric};
use crate::persistence::{compute_ph, PersistenceDiagram};
use crate::rng::{derive_seed, stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolesConfig {
    /// Points kept by farthest-point subsampling before the complex is built.
    pub subsample: usize,
    /// Mass parameter of the distance to measure.
    pub dtm_m: f64,
    pub train_fraction: f64,
    pub k_grid: Vec<usize>,
    pub folds: usize,
    pub signature: SignatureChoice,
    /// Transforms applied to the test clouds, one regime each.
    pub transforms: Vec<TransformKind>,
    pub jobs: usize,
}

impl Default for HolesConfig {
    fn default() -> Self {
        Self {
            subsample: 150,
            dtm_m: 0.03,
            train_fraction: 0.8,
            k_grid: vec![1, 5, 15],
            folds: 3,
            signature: SignatureChoice::Lifespans,
            transforms: TransformKind::ALL.to_vec(),
            jobs: 0,
        }
    }
}

/// Degree 0 and 1 diagram of the distance-to-measure weighted Rips complex
/// on a farthest-point subsample. The measure is that of the full cloud.
pub fn holes_diagram(cloud: &PointCloud, config: &HolesConfig, seed: u64) -> Result<PersistenceDiagram> {
    let idx = farthest_point_indices(cloud, config.subsample.min(cloud.len()), seed)?;
    let values = dtm_subset(cloud, &idx, config.dtm_m)?;
    let matrix = euclidean_distance_matrix(&cloud.select(&idx)?);
    let cx = weighted_rips_complex(&matrix, &values, RipsOptions::default())?;
    Ok(compute_ph(&cx, 1))
}

/// Trains a k-NN classifier of hole counts on degree-1 signatures and
/// scores it on the clean test clouds and on each transformed copy.
pub fn holes_pipeline(
    dataset: &LabeledDataset<PointCloud>,
    config: &HolesConfig,
    seed: u64,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let labels = dataset.label_values();
    let (train, test) = train_test_split(&labels, config.train_fraction, seed, true)?;
    let sub_seed = |i: usize| derive_seed(seed, stream::SUBSAMPLE, i as u64);
    let diagrams = par_map(config.jobs, &dataset.items, |i, c| holes_diagram(c, config, sub_seed(i)))?;

    let train_pd: Vec<PersistenceDiagram> = train.iter().map(|&i| diagrams[i].clone()).collect();
    let train_labels: Vec<f64> = train.iter().map(|&i| labels[i]).collect();
    let fitted = select_model(
        &train_pd,
        &train_labels,
        1,
        &config.signature.candidates(),
        &config.k_grid,
        KnnMode::Classify,
        config.folds,
        seed,
    )?;

    let test_labels: Vec<f64> = test.iter().map(|&i| labels[i]).collect();
    let mut report = ExperimentReport {
        experiment: "holes".into(),
        config: json!({
            "pipeline": config,
            "dataset": dataset.meta.params,
            "train_items": train.len(),
            "test_items": test.len(),
            "selection": fitted.selection,
        }),
        seed,
        regimes: Vec::new(),
        items: Vec::new(),
        warnings: Vec::new(),
        wall_time: Default::default(),
    };

    let clean: Vec<PersistenceDiagram> = test.iter().map(|&i| diagrams[i].clone()).collect();
    let preds = fitted.predict(&clean)?;
    report.push_regime("clean", Metric::Accuracy, accuracy(&preds, &test_labels)?);
    report.push_items("clean", &test_labels, &preds);

    for (t, &kind) in config.transforms.iter().enumerate() {
        let spec = TransformSpec::standard(kind);
        let moved = par_map(config.jobs, &test, |j, &i| {
            let s = derive_seed(seed, stream::TRANSFORM, (t * dataset.len() + j) as u64);
            holes_diagram(&apply_transform(&dataset.items[i], &spec, s)?, config, sub_seed(i))
        })?;
        let preds = fitted.predict(&moved)?;
        report.push_regime(kind.name(), Metric::Accuracy, accuracy(&preds, &test_labels)?);
        report.push_items(kind.name(), &test_labels, &preds);
    }
    report.wall_time = start.elapsed();
    Ok(report)
}
