use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::learn::{kfold_grid_search, knn_fit, FeatureMatrix, KnnMode, Metric, Model};
use crate::persistence::PersistenceDiagram;
use crate::signatures::{SignatureConfig, SignatureScheme};

/// Which signatures model selection may choose from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignatureChoice {
    /// The ten longest lifespans.
    #[default]
    Lifespans,
    /// Persistence images over the bandwidth and weight grid.
    Pi,
    /// Persistence landscapes over the longest 1, 10 or all intervals.
    Pl,
    /// All of the above.
    Auto,
}

impl SignatureChoice {
    pub fn candidates(self) -> Vec<SignatureConfig> {
        let grid = SignatureConfig::standard_grid();
        match self {
            SignatureChoice::Lifespans => vec![SignatureConfig::Lifespans { k: Some(10) }],
            SignatureChoice::Pi => grid.into_iter().filter(|c| matches!(c, SignatureConfig::Image { .. })).collect(),
            SignatureChoice::Pl => {
                grid.into_iter().filter(|c| matches!(c, SignatureConfig::Landscape { .. })).collect()
            }
            SignatureChoice::Auto => grid,
        }
    }
}

impl fmt::Display for SignatureChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignatureChoice::Lifespans => "lifespans",
            SignatureChoice::Pi => "pi",
            SignatureChoice::Pl => "pl",
            SignatureChoice::Auto => "auto",
        })
    }
}

impl FromStr for SignatureChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lifespans" => Ok(SignatureChoice::Lifespans),
            "pi" => Ok(SignatureChoice::Pi),
            "pl" => Ok(SignatureChoice::Pl),
            "auto" => Ok(SignatureChoice::Auto),
            _ => Err(Error::invalid(format!("unknown signature '{s}', expected lifespans, pi, pl or auto"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub signature: SignatureConfig,
    pub k: usize,
    /// Mean validation score; `None` when there was nothing to choose.
    pub cv_score: Option<f64>,
}

/// Signature scheme and k-NN model fitted on the full training set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedPredictor {
    pub scheme: SignatureScheme,
    pub model: Model,
    pub selection: Selection,
}

fn features(scheme: &SignatureScheme, diagrams: &[&PersistenceDiagram]) -> Result<FeatureMatrix> {
    let mut data = Vec::with_capacity(diagrams.len() * scheme.len());
    for pd in diagrams {
        data.extend(scheme.values(pd));
    }
    FeatureMatrix::new(scheme.len(), data)
}

fn fit(
    diagrams: &[&PersistenceDiagram],
    labels: &[f64],
    dim: u8,
    signature: &SignatureConfig,
    k: usize,
    mode: KnnMode,
) -> Result<(SignatureScheme, Model)> {
    let owned: Vec<PersistenceDiagram> = diagrams.iter().map(|&pd| pd.clone()).collect();
    let scheme = signature.fit(dim, &owned)?;
    let model = knn_fit(&features(&scheme, diagrams)?, labels, k, mode)?;
    Ok((scheme, model))
}

impl FittedPredictor {
    pub fn predict(&self, diagrams: &[PersistenceDiagram]) -> Result<Vec<f64>> {
        let refs: Vec<&PersistenceDiagram> = diagrams.iter().collect();
        self.model.predict(&features(&self.scheme, &refs)?)
    }
}

/// Chooses a signature and `k` by k-fold cross validation (stratified for
/// classification), then refits on all of `diagrams`. Values of `k` larger
/// than the smallest training fold are skipped.
#[allow(clippy::too_many_arguments)]
pub fn select_model(
    diagrams: &[PersistenceDiagram],
    labels: &[f64],
    dim: u8,
    signatures: &[SignatureConfig],
    k_grid: &[usize],
    mode: KnnMode,
    folds: usize,
    seed: u64,
) -> Result<FittedPredictor> {
    let n = diagrams.len();
    let fold_train = n - n.div_ceil(folds.max(1));
    let mut grid = Vec::new();
    for s in signatures {
        for &k in k_grid.iter().filter(|&&k| k >= 1 && k <= fold_train) {
            grid.push((s.clone(), k));
        }
    }
    if grid.is_empty() {
        return Err(Error::invalid(format!("no k in {k_grid:?} fits {n} training items in {folds} folds")));
    }
    let refs: Vec<&PersistenceDiagram> = diagrams.iter().collect();
    let (best, cv_score) = if grid.len() == 1 {
        (0, None)
    } else {
        let metric = match mode {
            KnnMode::Classify => Metric::Accuracy,
            KnnMode::Regress => Metric::Mse,
        };
        let result =
            kfold_grid_search(&grid, labels, folds, seed, mode == KnnMode::Classify, metric, |(s, k), tr, va| {
                let d: Vec<&PersistenceDiagram> = tr.iter().map(|&i| refs[i]).collect();
                let l: Vec<f64> = tr.iter().map(|&i| labels[i]).collect();
                let (scheme, model) = fit(&d, &l, dim, s, *k, mode)?;
                let v: Vec<&PersistenceDiagram> = va.iter().map(|&i| refs[i]).collect();
                model.predict(&features(&scheme, &v)?)
            })?;
        (result.best, Some(result.best_score))
    };
    let (signature, k) = grid.swap_remove(best);
    let (scheme, model) = fit(&refs, labels, dim, &signature, k, mode)?;
    Ok(FittedPredictor { scheme, model, selection: Selection { signature, k, cv_score } })
}
