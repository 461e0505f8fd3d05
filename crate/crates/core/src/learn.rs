//! Small learners, model selection and metrics.
//!
//! k-NN and the standardized ridge regressor scale every feature column to
//! zero mean and unit variance using statistics of the training rows only;
//! the statistics are kept in the fitted model and reused on test rows.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, stream};

/// Rectangular table of finite features, one row per item.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(cols: usize, data: Vec<f64>) -> Result<Self> {
        if cols == 0 && !data.is_empty() || cols > 0 && !data.len().is_multiple_of(cols) {
            return Err(Error::invalid(format!("{} values do not fill rows of {cols}", data.len())));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite feature {v}")));
        }
        Ok(Self { cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::invalid(format!("ragged feature rows: {} and {cols} columns", r.len())));
        }
        Self::new(cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.data.len().checked_div(self.cols).unwrap_or(0)
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.rows()).map(move |i| self.row(i))
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self { cols: self.cols, data }
    }
}

/// Per-column affine map to zero mean and unit variance. Constant columns
/// keep scale one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &FeatureMatrix) -> Result<Self> {
        let n = x.rows();
        if n == 0 {
            return Err(Error::invalid("cannot standardize an empty feature matrix"));
        }
        let mut mean = vec![0.0; x.cols()];
        for r in x.iter_rows() {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v / n as f64;
            }
        }
        let mut var = vec![0.0; x.cols()];
        for r in x.iter_rows() {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m) / n as f64;
            }
        }
        let scale = var.into_iter().map(|v| if v > 1e-24 { v.sqrt() } else { 1.0 }).collect();
        Ok(Self { mean, scale })
    }

    pub fn apply_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(&self.mean).zip(&self.scale).map(|((v, m), s)| (v - m) / s).collect()
    }

    pub fn apply(&self, x: &FeatureMatrix) -> FeatureMatrix {
        let data = x.iter_rows().flat_map(|r| self.apply_row(r)).collect();
        FeatureMatrix { cols: x.cols(), data }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KnnMode {
    Classify,
    Regress,
}

/// A fitted model. Predictions are reals; class predictions are integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Knn {
        k: usize,
        mode: KnnMode,
        standardizer: Standardizer,
        /// Standardized training rows.
        train: FeatureMatrix,
        labels: Vec<f64>,
    },
    Ridge {
        weights: Vec<f64>,
        intercept: f64,
        lambda: f64,
        /// Present when the weights act on standardized features.
        standardizer: Option<Standardizer>,
    },
    /// Predicts `above` for scalars greater than `threshold`, else `below`.
    Threshold { threshold: f64, above: f64, below: f64 },
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

pub fn knn_fit(train: &FeatureMatrix, labels: &[f64], k: usize, mode: KnnMode) -> Result<Model> {
    if train.rows() == 0 {
        return Err(Error::invalid("k-NN needs at least one training row"));
    }
    if labels.len() != train.rows() {
        return Err(Error::invalid(format!("{} labels for {} rows", labels.len(), train.rows())));
    }
    if k == 0 || k > train.rows() {
        return Err(Error::invalid(format!("k = {k} must lie in 1..={}", train.rows())));
    }
    let standardizer = Standardizer::fit(train)?;
    Ok(Model::Knn { k, mode, train: standardizer.apply(train), standardizer, labels: labels.to_vec() })
}

/// Majority vote among the `k` nearest rows, ties to the smallest label;
/// or their mean label. Equidistant rows are ordered by label and then by
/// content, so the result does not depend on the order of training rows.
fn knn_predict_row(k: usize, mode: KnnMode, train: &FeatureMatrix, labels: &[f64], q: &[f64]) -> f64 {
    let mut order: Vec<(f64, usize)> = train.iter_rows().map(|r| sq_dist(r, q)).zip(0..).collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| {
        a.0.total_cmp(&b.0)
            .then(labels[a.1].total_cmp(&labels[b.1]))
            .then_with(|| lex_cmp(train.row(a.1), train.row(b.1)))
    };
    if k < order.len() {
        order.select_nth_unstable_by(k - 1, cmp);
        order.truncate(k);
    }
    let near: Vec<f64> = order.iter().map(|&(_, i)| labels[i]).collect();
    match mode {
        KnnMode::Regress => near.iter().sum::<f64>() / near.len() as f64,
        KnnMode::Classify => {
            let mut sorted = near;
            sorted.sort_by(f64::total_cmp);
            let (mut best, mut best_count) = (sorted[0], 0);
            let mut i = 0;
            while i < sorted.len() {
                let j = sorted[i..].iter().position(|&v| v != sorted[i]).map_or(sorted.len(), |p| i + p);
                if j - i > best_count {
                    (best, best_count) = (sorted[i], j - i);
                }
                i = j;
            }
            best
        }
    }
}

pub fn knn_fit_predict(
    train: &FeatureMatrix,
    labels: &[f64],
    test: &FeatureMatrix,
    k: usize,
    mode: KnnMode,
) -> Result<Vec<f64>> {
    knn_fit(train, labels, k, mode)?.predict(test)
}

/// Minimizes `|Xw + b - y|^2 + lambda |w|^2` on raw features. The intercept
/// is not penalized: features and labels are centered, the centered normal
/// equations are solved by Cholesky, and `b` restores the means.
pub fn ridge_fit(x: &FeatureMatrix, y: &[f64], lambda: f64) -> Result<Model> {
    let (weights, intercept) = ridge_solve(x, y, lambda)?;
    Ok(Model::Ridge { weights, intercept, lambda, standardizer: None })
}

/// Ridge regression on standardized features.
pub fn ridge_fit_standardized(x: &FeatureMatrix, y: &[f64], lambda: f64) -> Result<Model> {
    let s = Standardizer::fit(x)?;
    let (weights, intercept) = ridge_solve(&s.apply(x), y, lambda)?;
    Ok(Model::Ridge { weights, intercept, lambda, standardizer: Some(s) })
}

fn ridge_solve(x: &FeatureMatrix, y: &[f64], lambda: f64) -> Result<(Vec<f64>, f64)> {
    let (n, p) = (x.rows(), x.cols());
    if n == 0 || y.len() != n {
        return Err(Error::invalid(format!("{} labels for {n} rows", y.len())));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("ridge penalty must be non-negative, got {lambda}")));
    }
    let xm = DMatrix::from_row_slice(n, p, &x.data);
    let means: Vec<f64> = (0..p).map(|j| xm.column(j).mean()).collect();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let xc = DMatrix::from_fn(n, p, |i, j| xm[(i, j)] - means[j]);
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));
    let mut gram = xc.transpose() * &xc;
    for j in 0..p {
        gram[(j, j)] += lambda;
    }
    let rhs = xc.transpose() * yc;
    let chol = gram.cholesky().ok_or_else(|| {
        Error::Singular("normal equations are not positive definite; use a positive ridge penalty".into())
    })?;
    let w = chol.solve(&rhs);
    let intercept = y_mean - w.iter().zip(&means).map(|(a, b)| a * b).sum::<f64>();
    Ok((w.iter().copied().collect(), intercept))
}

/// Threshold and polarity with the best training accuracy. Candidate
/// thresholds are midpoints of adjacent distinct values and the largest
/// value; ties go to the smaller threshold.
pub fn threshold_fit(scalars: &[f64], labels: &[f64]) -> Result<Model> {
    if scalars.len() != labels.len() {
        return Err(Error::invalid(format!("{} scalars for {} labels", scalars.len(), labels.len())));
    }
    let mut classes: Vec<f64> = labels.to_vec();
    classes.sort_by(f64::total_cmp);
    classes.dedup();
    if classes.len() != 2 {
        return Err(Error::invalid(format!("threshold fit needs exactly two classes, got {}", classes.len())));
    }
    let mut pairs: Vec<(f64, f64)> = scalars.iter().copied().zip(labels.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut candidates: Vec<f64> =
        pairs.windows(2).filter(|w| w[1].0 > w[0].0).map(|w| (w[0].0 + w[1].0) / 2.0).collect();
    candidates.push(pairs[pairs.len() - 1].0);

    let (lo, hi) = (classes[0], classes[1]);
    let n_hi_total = pairs.iter().filter(|p| p.1 == hi).count();
    let mut best: Option<(usize, Model)> = None;
    // Running counts of each class at or below the candidate.
    let (mut k, mut lo_below, mut hi_below) = (0, 0usize, 0usize);
    for t in candidates {
        while k < pairs.len() && pairs[k].0 <= t {
            if pairs[k].1 == hi {
                hi_below += 1;
            } else {
                lo_below += 1;
            }
            k += 1;
        }
        let hi_above = n_hi_total - hi_below;
        let lo_above = pairs.len() - n_hi_total - lo_below;
        for (correct, above, below) in [(hi_above + lo_below, hi, lo), (lo_above + hi_below, lo, hi)] {
            if best.as_ref().is_none_or(|b| correct > b.0) {
                best = Some((correct, Model::Threshold { threshold: t, above, below }));
            }
        }
    }
    Ok(best.expect("at least one candidate").1)
}

impl Model {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            Model::Knn { k, mode, standardizer, train, labels } => {
                knn_predict_row(*k, *mode, train, labels, &standardizer.apply_row(row))
            }
            Model::Ridge { weights, intercept, standardizer, .. } => {
                let z;
                let row = match standardizer {
                    Some(s) => {
                        z = s.apply_row(row);
                        &z[..]
                    }
                    None => row,
                };
                intercept + weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>()
            }
            Model::Threshold { threshold, above, below } => {
                if row[0] > *threshold {
                    *above
                } else {
                    *below
                }
            }
        }
    }

    pub fn predict(&self, rows: &FeatureMatrix) -> Result<Vec<f64>> {
        let expected = match self {
            Model::Knn { train, .. } => train.cols(),
            Model::Ridge { weights, .. } => weights.len(),
            Model::Threshold { .. } => 1,
        };
        if rows.cols() != expected && rows.rows() > 0 {
            return Err(Error::invalid(format!("model expects {expected} features, got {}", rows.cols())));
        }
        Ok(rows.iter_rows().map(|r| self.predict_row(r)).collect())
    }

    pub fn predict_scalars(&self, scalars: &[f64]) -> Vec<f64> {
        scalars.iter().map(|&s| self.predict_row(&[s])).collect()
    }
}

fn check_lengths(preds: &[f64], labels: &[f64]) -> Result<()> {
    if preds.len() != labels.len() {
        return Err(Error::invalid(format!("{} predictions for {} labels", preds.len(), labels.len())));
    }
    if preds.is_empty() {
        return Err(Error::invalid("metrics need at least one prediction"));
    }
    Ok(())
}

pub fn accuracy(preds: &[f64], labels: &[f64]) -> Result<f64> {
    check_lengths(preds, labels)?;
    Ok(preds.iter().zip(labels).filter(|(p, l)| p == l).count() as f64 / preds.len() as f64)
}

pub fn mse(preds: &[f64], labels: &[f64]) -> Result<f64> {
    check_lengths(preds, labels)?;
    Ok(preds.iter().zip(labels).map(|(p, l)| (p - l) * (p - l)).sum::<f64>() / preds.len() as f64)
}

/// Ranks starting at one, ties sharing their average rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

/// Spearman rank correlation; zero when either side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a, b)?;
    Ok(pearson(&ranks(a), &ranks(b)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Higher is better.
    Accuracy,
    /// Lower is better.
    Mse,
}

impl Metric {
    pub fn eval(self, preds: &[f64], labels: &[f64]) -> Result<f64> {
        match self {
            Metric::Accuracy => accuracy(preds, labels),
            Metric::Mse => mse(preds, labels),
        }
    }

    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Metric::Accuracy => a > b,
            Metric::Mse => a < b,
        }
    }
}

/// Fold index per item. Items are shuffled with a seed-derived stream and
/// dealt round-robin; with `strata`, each class is dealt in turn so every
/// fold receives a near-equal share of it.
pub fn kfold_assignment(n: usize, folds: usize, seed: u64, strata: Option<&[f64]>) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {folds}")));
    }
    if n < folds {
        return Err(Error::invalid(format!("{n} items cannot fill {folds} folds")));
    }
    let mut rng = rng_from_seed(derive_seed(seed, stream::FOLDS, 0));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut out = vec![0; n];
    match strata {
        None => {
            for (pos, &i) in order.iter().enumerate() {
                out[i] = pos % folds;
            }
        }
        Some(s) => {
            if s.len() != n {
                return Err(Error::invalid(format!("{} strata for {n} items", s.len())));
            }
            let mut classes: Vec<f64> = s.to_vec();
            classes.sort_by(f64::total_cmp);
            classes.dedup();
            let mut dealt = 0;
            for c in classes {
                let members: Vec<usize> = order.iter().copied().filter(|&i| s[i] == c).collect();
                if members.len() < folds {
                    return Err(Error::invalid(format!(
                        "class {c} has {} items, fewer than {folds} folds",
                        members.len()
                    )));
                }
                for i in members {
                    out[i] = dealt % folds;
                    dealt += 1;
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best: usize,
    pub best_score: f64,
    /// Mean validation score per grid point, in grid order.
    pub scores: Vec<f64>,
}

/// Scores every grid point by its mean validation metric over the folds.
/// `evaluate(config, train, validation)` returns predictions for the
/// validation items. The first of equally good configs wins.
pub fn kfold_grid_search<C, F>(
    grid: &[C],
    labels: &[f64],
    folds: usize,
    seed: u64,
    stratified: bool,
    metric: Metric,
    evaluate: F,
) -> Result<GridSearchResult>
where
    C: Sync,
    F: Fn(&C, &[usize], &[usize]) -> Result<Vec<f64>> + Sync,
{
    if grid.is_empty() {
        return Err(Error::invalid("grid search needs at least one configuration"));
    }
    let assignment = kfold_assignment(labels.len(), folds, seed, stratified.then_some(labels))?;
    let splits: Vec<(Vec<usize>, Vec<usize>)> =
        (0..folds).map(|f| (0..labels.len()).partition(|&i| assignment[i] != f)).collect();
    let scores: Vec<f64> = grid
        .par_iter()
        .map(|c| {
            let mut total = 0.0;
            for (train, val) in &splits {
                let preds = evaluate(c, train, val)?;
                let truth: Vec<f64> = val.iter().map(|&i| labels[i]).collect();
                total += metric.eval(&preds, &truth)?;
            }
            Ok(total / folds as f64)
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if metric.better(s, scores[best]) {
            best = i;
        }
    }
    Ok(GridSearchResult { best, best_score: scores[best], scores })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng as _;
    use rand_distr::{Distribution, Normal};

    fn fm(rows: &[Vec<f64>]) -> FeatureMatrix {
        FeatureMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn feature_matrix_validation() {
        assert!(FeatureMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(FeatureMatrix::new(2, vec![1.0, f64::NAN]).is_err());
        assert_eq!(fm(&[vec![1.0, 2.0], vec![3.0, 4.0]]).select(&[1]).row(0), &[3.0, 4.0]);
    }

    #[test]
    fn standardizer_uses_training_statistics() {
        let train = fm(&[vec![0.0, 5.0], vec![2.0, 5.0]]);
        let s = Standardizer::fit(&train).unwrap();
        assert_eq!(s.mean, vec![1.0, 5.0]);
        assert_eq!(s.scale, vec![1.0, 1.0]);
        assert_eq!(s.apply_row(&[3.0, 7.0]), vec![2.0, 2.0]);
    }

    #[test]
    fn knn_examples() {
        let train = fm(&[vec![0.0], vec![1.0], vec![5.0], vec![9.0]]);
        let labels = [1.0, 2.0, 3.0, 6.0];
        let all = knn_fit_predict(&train, &labels, &fm(&[vec![100.0], vec![-3.0]]), 4, KnnMode::Regress).unwrap();
        assert_eq!(all, vec![3.0, 3.0]);
        let one = knn_fit_predict(&train, &labels, &fm(&[vec![5.0]]), 1, KnnMode::Classify).unwrap();
        assert_eq!(one, vec![3.0]);
        // Two votes each: the smaller label wins.
        let tie = knn_fit_predict(&train, &[1.0, 1.0, 0.0, 0.0], &fm(&[vec![3.0]]), 4, KnnMode::Classify).unwrap();
        assert_eq!(tie, vec![0.0]);
        assert!(knn_fit_predict(&fm(&[]), &[], &train, 1, KnnMode::Classify).is_err());
        assert!(knn_fit(&train, &labels, 5, KnnMode::Classify).is_err());
    }

    #[test]
    fn knn_separates_distant_clusters() {
        let mut rng = rng_from_seed(1);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..200 {
            let c = if i % 2 == 0 { 0.0 } else { 10.0 };
            rows.push(vec![c + noise.sample(&mut rng), noise.sample(&mut rng)]);
            labels.push(c);
        }
        let train = fm(&rows[..100]);
        let preds = knn_fit_predict(&train, &labels[..100], &fm(&rows[100..]), 5, KnnMode::Classify).unwrap();
        assert_eq!(accuracy(&preds, &labels[100..]).unwrap(), 1.0);
    }

    #[test]
    fn ridge_recovers_a_line_and_shrinks() {
        let x = fm(&(0..10).map(|i| vec![i as f64]).collect::<Vec<_>>());
        let y: Vec<f64> = (0..10).map(|i| 2.0 * i as f64 + 1.0).collect();
        match ridge_fit(&x, &y, 0.0).unwrap() {
            Model::Ridge { weights, intercept, .. } => {
                assert_abs_diff_eq!(weights[0], 2.0, epsilon = 1e-9);
                assert_abs_diff_eq!(intercept, 1.0, epsilon = 1e-9);
            }
            _ => unreachable!(),
        }
        let m = ridge_fit(&x, &y, 1e12).unwrap();
        for p in m.predict(&x).unwrap() {
            assert_abs_diff_eq!(p, 10.0, epsilon = 1e-6);
        }
        let constant = fm(&[vec![1.0], vec![1.0], vec![1.0]]);
        assert!(matches!(ridge_fit(&constant, &[1.0, 2.0, 3.0], 0.0), Err(Error::Singular(_))));
    }

    #[test]
    fn ridge_satisfies_the_optimality_condition() {
        let mut rng = rng_from_seed(7);
        let rows: Vec<Vec<f64>> = (0..20).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let y: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lambda = 1e-6;
        let Model::Ridge { weights, intercept, .. } = ridge_fit(&fm(&rows), &y, lambda).unwrap() else {
            unreachable!()
        };
        let resid: Vec<f64> = rows
            .iter()
            .zip(&y)
            .map(|(r, t)| intercept + r.iter().zip(&weights).map(|(a, b)| a * b).sum::<f64>() - t)
            .collect();
        let mut grad = [0.0; 3];
        for (r, e) in rows.iter().zip(&resid) {
            for j in 0..3 {
                grad[j] += r[j] * e;
            }
        }
        let norm = (0..3).map(|j| (grad[j] + lambda * weights[j]).powi(2)).sum::<f64>().sqrt();
        assert!(norm <= 1e-6, "{norm}");
        assert!(resid.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn threshold_examples() {
        let m = threshold_fit(&[0.0, 0.0, 5.0, 7.0], &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(m, Model::Threshold { threshold: 2.5, above: 0.0, below: 1.0 });
        let constant = threshold_fit(&[3.0; 5], &[0.0, 1.0, 1.0, 1.0, 0.0]).unwrap();
        let preds = constant.predict_scalars(&[3.0; 5]);
        assert_eq!(accuracy(&preds, &[0.0, 1.0, 1.0, 1.0, 0.0]).unwrap(), 0.6);
        assert!(threshold_fit(&[1.0, 2.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn metric_examples() {
        let l = [1.0, 2.0, 3.0, 6.0];
        assert_eq!(accuracy(&l, &l).unwrap(), 1.0);
        assert_eq!(mse(&l, &l).unwrap(), 0.0);
        let mean = [3.0; 4];
        let var = l.iter().map(|v| (v - 3.0) * (v - 3.0)).sum::<f64>() / 4.0;
        assert_eq!(mse(&mean, &l).unwrap(), var);
        assert!(mse(&l[..2], &l).is_err());
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn folds_are_balanced_and_seeded() {
        let labels: Vec<f64> = (0..30).map(|i| (i % 3) as f64).collect();
        let a = kfold_assignment(30, 3, 5, Some(&labels)).unwrap();
        assert_eq!(a, kfold_assignment(30, 3, 5, Some(&labels)).unwrap());
        for f in 0..3 {
            assert_eq!((0..30).filter(|&i| a[i] == f).count(), 10);
            for c in 0..3 {
                let n = (0..30).filter(|&i| a[i] == f && labels[i] == c as f64).count();
                assert!(n == 3 || n == 4);
            }
        }
        assert!(kfold_assignment(30, 3, 5, Some(&[&labels[..29], &[7.0]].concat())).is_err());
        assert!(kfold_assignment(30, 1, 5, None).is_err());
    }

    #[test]
    fn grid_search_picks_the_dominant_config() {
        let labels: Vec<f64> = (0..12).map(|i| (i % 2) as f64).collect();
        let single =
            kfold_grid_search(&[()], &labels, 3, 1, true, Metric::Accuracy, |_, _, v| Ok(vec![0.0; v.len()])).unwrap();
        assert_eq!(single.best, 0);
        let result = kfold_grid_search(&[false, true], &labels, 3, 1, false, Metric::Accuracy, |good, _, v| {
            Ok(v.iter().map(|&i| if *good { labels[i] } else { 1.0 - labels[i] }).collect())
        })
        .unwrap();
        assert_eq!((result.best, result.best_score), (1, 1.0));
    }

    #[test]
    fn model_json_round_trip() {
        let m = knn_fit(&fm(&[vec![0.0, 1.0], vec![2.0, 3.0]]), &[0.0, 1.0], 1, KnnMode::Classify).unwrap();
        let back: Model = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    proptest! {
        #[test]
        fn predictions_ignore_training_order(
            rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 6..20),
            seed in any::<u64>(),
            q in prop::collection::vec(-5.0f64..5.0, 2),
        ) {
            let labels: Vec<f64> = (0..rows.len()).map(|i| (i % 3) as f64).collect();
            let mut perm: Vec<usize> = (0..rows.len()).collect();
            perm.shuffle(&mut rng_from_seed(seed));
            let prow: Vec<Vec<f64>> = perm.iter().map(|&i| rows[i].clone()).collect();
            let plab: Vec<f64> = perm.iter().map(|&i| labels[i]).collect();
            let query = fm(&[q]);
            for mode in [KnnMode::Classify, KnnMode::Regress] {
                let a = knn_fit_predict(&fm(&rows), &labels, &query, 3, mode).unwrap();
                let b = knn_fit_predict(&fm(&prow), &plab, &query, 3, mode).unwrap();
                prop_assert!((a[0] - b[0]).abs() < 1e-9);
            }
            let a = ridge_fit(&fm(&rows), &labels, 0.1).unwrap().predict(&query).unwrap();
            let b = ridge_fit(&fm(&prow), &plab, 0.1).unwrap().predict(&query).unwrap();
            prop_assert!((a[0] - b[0]).abs() < 1e-9);
        }

        #[test]
        fn threshold_beats_the_prior(values in prop::collection::vec(0.0f64..1.0, 100), flips in prop::collection::vec(any::<bool>(), 100)) {
            let labels: Vec<f64> = flips.iter().map(|&b| f64::from(u8::from(b))).collect();
            prop_assume!(labels.contains(&0.0) && labels.contains(&1.0));
            let m = threshold_fit(&values, &labels).unwrap();
            let acc = accuracy(&m.predict_scalars(&values), &labels).unwrap();
            let ones = labels.iter().sum::<f64>() / 100.0;
            prop_assert!(acc >= ones.max(1.0 - ones) - 1e-12);
        }
    }
}
