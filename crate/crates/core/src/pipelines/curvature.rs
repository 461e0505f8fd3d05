use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use super::{par_map, select_model, ExperimentReport, SignatureChoice};
use crate::complex::{rips_complex, RipsOptions};
use crate::datagen::LabeledDataset;
use crate::error::{Error, Result};
use crate::geometry::{geodesic_distance_matrix, PolarCloud};
use crate::learn::{accuracy, mse, KnnMode, Metric};
use crate::persistence::{compute_ph, PersistenceDiagram};
use crate::signatures::SignatureConfig;

/// Feature set fed to the regressor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureVariant {
    /// Every finite lifespan, sorted and zero-padded.
    Simple,
    /// The ten longest lifespans.
    Simple10,
    /// Signature chosen by cross validation.
    Ph,
}

impl fmt::Display for CurvatureVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurvatureVariant::Simple => "simple",
            CurvatureVariant::Simple10 => "simple10",
            CurvatureVariant::Ph => "ph",
        })
    }
}

impl FromStr for CurvatureVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(CurvatureVariant::Simple),
            "simple10" => Ok(CurvatureVariant::Simple10),
            "ph" => Ok(CurvatureVariant::Ph),
            _ => Err(Error::invalid(format!("unknown curvature variant '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePipelineConfig {
    pub variants: Vec<CurvatureVariant>,
    pub dims: Vec<u8>,
    pub k_grid: Vec<usize>,
    pub folds: usize,
    /// Candidates of the `ph` variant.
    pub signature: SignatureChoice,
    /// Sign accuracy only counts test items with `|kappa|` above this.
    pub sign_margin: f64,
    pub jobs: usize,
}

impl Default for CurvaturePipelineConfig {
    fn default() -> Self {
        Self {
            variants: vec![CurvatureVariant::Simple, CurvatureVariant::Simple10],
            dims: vec![0, 1],
            k_grid: vec![1, 5, 15],
            folds: 3,
            signature: SignatureChoice::Auto,
            sign_margin: 0.25,
            jobs: 0,
        }
    }
}

/// Degree 0 and 1 diagram of the Rips filtration on geodesic distances.
pub fn curvature_diagram(cloud: &PolarCloud) -> Result<PersistenceDiagram> {
    let cx = rips_complex(&geodesic_distance_matrix(cloud)?, RipsOptions::default())?;
    Ok(compute_ph(&cx, 1))
}

fn sign_accuracy(preds: &[f64], labels: &[f64], margin: f64) -> Result<f64> {
    let (p, l): (Vec<f64>, Vec<f64>) =
        preds.iter().zip(labels).filter(|(_, l)| l.abs() > margin).map(|(p, l)| (p.signum(), l.signum())).unzip();
    accuracy(&p, &l)
}

/// k-NN regression of curvature for every requested degree and variant.
/// Regimes are `dim{d}_{variant}` (mean squared error) and
/// `dim{d}_{variant}_sign` (sign accuracy away from zero).
pub fn curvature_pipeline(
    train: &LabeledDataset<PolarCloud>,
    test: &LabeledDataset<PolarCloud>,
    config: &CurvaturePipelineConfig,
    seed: u64,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let train_pd = par_map(config.jobs, &train.items, |_, c| curvature_diagram(c))?;
    let test_pd = par_map(config.jobs, &test.items, |_, c| curvature_diagram(c))?;
    let (train_labels, test_labels) = (train.label_values(), test.label_values());

    let mut report = ExperimentReport {
        experiment: "curvature".into(),
        config: json!({
            "pipeline": config,
            "train": train.meta.params,
            "train_items": train.len(),
            "test_items": test.len(),
        }),
        seed,
        regimes: Vec::new(),
        items: Vec::new(),
        warnings: Vec::new(),
        wall_time: Default::default(),
    };
    let mut selections = Vec::new();
    for &dim in &config.dims {
        for &variant in &config.variants {
            let candidates = match variant {
                CurvatureVariant::Simple => vec![SignatureConfig::Lifespans { k: None }],
                CurvatureVariant::Simple10 => vec![SignatureConfig::Lifespans { k: Some(10) }],
                CurvatureVariant::Ph => config.signature.candidates(),
            };
            let fitted = select_model(
                &train_pd,
                &train_labels,
                dim,
                &candidates,
                &config.k_grid,
                KnnMode::Regress,
                config.folds,
                seed,
            )?;
            let preds = fitted.predict(&test_pd)?;
            let name = format!("dim{dim}_{variant}");
            report.push_regime(&name, Metric::Mse, mse(&preds, &test_labels)?);
            match sign_accuracy(&preds, &test_labels, config.sign_margin) {
                Ok(a) => report.push_regime(&format!("{name}_sign"), Metric::Accuracy, a),
                Err(_) => report.warnings.push(format!("{name}: no test curvature beyond the sign margin")),
            }
            report.push_items(&name, &test_labels, &preds);
            selections.push(json!({ "regime": name, "selection": fitted.selection }));
        }
    }
    report.config["selections"] = json!(selections);
    report.wall_time = start.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{gen_curvature_dataset, CurvatureConfig};

    #[test]
    fn memorizes_training_set_with_one_neighbor() {
        let cfg = CurvatureConfig { clouds_per_kappa: 1, points: 15, test_count: 1 };
        let (train, _) = gen_curvature_dataset(&cfg, 2).unwrap();
        let few = train.subset(&[0, 25, 50, 75, 100]);
        let pipeline = CurvaturePipelineConfig { dims: vec![0], k_grid: vec![1], folds: 2, ..Default::default() };
        let report = curvature_pipeline(&few, &few, &pipeline, 0).unwrap();
        assert_eq!(report.regime("dim0_simple"), Some(0.0));
        assert_eq!(report.regime("dim0_simple10"), Some(0.0));
    }

    #[test]
    fn sign_accuracy_ignores_near_flat_items() {
        let a = sign_accuracy(&[0.5, -0.1, 0.2], &[1.0, 0.1, -1.0], 0.25).unwrap();
        assert_eq!(a, 0.5);
    }
}
