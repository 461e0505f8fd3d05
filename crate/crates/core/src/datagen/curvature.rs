use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::{DatasetMeta, Label, LabeledDataset};
use crate::error::Result;
use crate::geometry::{check_curvature, PolarCloud};
use crate::rng::{derive_seed, rng_from_seed, stream};

/// Spacing of the training curvatures, which run from -2 to 2.
pub const KAPPA_GRID_STEP: f64 = 0.04;

/// Fraction of the disk's area within geodesic radius `rho`.
pub fn radial_cdf(kappa: f64, rho: f64) -> f64 {
    let rho = rho.clamp(0.0, 1.0);
    if kappa > 0.0 {
        let r = 1.0 / kappa.sqrt();
        ((rho / (2.0 * r)).sin() / (1.0 / (2.0 * r)).sin()).powi(2)
    } else if kappa < 0.0 {
        let r = 1.0 / (-kappa).sqrt();
        ((rho / (2.0 * r)).sinh() / (1.0 / (2.0 * r)).sinh()).powi(2)
    } else {
        rho * rho
    }
}

/// Geodesic radius at which the area fraction reaches `u`, written with
/// half-angle forms that stay accurate as `kappa` approaches zero.
pub fn radial_inverse_cdf(kappa: f64, u: f64) -> f64 {
    let s = u.clamp(0.0, 1.0).sqrt();
    let rho = if kappa > 0.0 {
        let r = 1.0 / kappa.sqrt();
        2.0 * r * (s * (1.0 / (2.0 * r)).sin()).asin()
    } else if kappa < 0.0 {
        let r = 1.0 / (-kappa).sqrt();
        2.0 * r * (s * (1.0 / (2.0 * r)).sinh()).asinh()
    } else {
        s
    };
    rho.min(1.0)
}

/// `n` points uniform with respect to area on the geodesic unit disk of the
/// constant-curvature surface.
pub fn sample_constant_curvature_disk(kappa: f64, n: usize, seed: u64) -> Result<PolarCloud> {
    check_curvature(kappa)?;
    let mut rng = rng_from_seed(seed);
    let coords = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let phi = rng.random_range(0.0..TAU);
            (radial_inverse_cdf(kappa, u), phi)
        })
        .collect();
    PolarCloud::new(coords, kappa)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureConfig {
    pub clouds_per_kappa: usize,
    pub points: usize,
    pub test_count: usize,
}

impl Default for CurvatureConfig {
    fn default() -> Self {
        Self { clouds_per_kappa: 10, points: 500, test_count: 100 }
    }
}

/// Training clouds on the 101 grid curvatures and test clouds at
/// curvatures drawn uniformly from [-2, 2].
pub fn gen_curvature_dataset(
    config: &CurvatureConfig,
    seed: u64,
) -> Result<(LabeledDataset<PolarCloud>, LabeledDataset<PolarCloud>)> {
    let params = serde_json::to_value(config)?;
    let build = |generator: &str, kappas: Vec<f64>, tag: u64| -> Result<LabeledDataset<PolarCloud>> {
        let mut items = Vec::with_capacity(kappas.len());
        let mut item_seeds = Vec::with_capacity(kappas.len());
        for (i, &k) in kappas.iter().enumerate() {
            let s = derive_seed(seed, tag, i as u64);
            items.push(sample_constant_curvature_disk(k, config.points, s)?);
            item_seeds.push(s);
        }
        Ok(LabeledDataset {
            items,
            labels: kappas.iter().map(|&k| Label::Value(k)).collect(),
            meta: DatasetMeta {
                generator: generator.into(),
                seed,
                item_seeds,
                shape_ids: kappas.iter().map(|k| format!("kappa_{k}")).collect(),
                params: params.clone(),
            },
        })
    };
    let train: Vec<f64> =
        (0..=100).flat_map(|i| std::iter::repeat_n((i as f64 - 50.0) / 25.0, config.clouds_per_kappa)).collect();
    let mut rng = rng_from_seed(derive_seed(seed, stream::TEST_SET, 0));
    let test: Vec<f64> = (0..config.test_count).map(|_| rng.random_range(-2.0..=2.0)).collect();
    Ok((build("curvature_train", train, stream::ITEM)?, build("curvature_test", test, stream::TEST_SET)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cdf_examples() {
        assert!((radial_inverse_cdf(0.0, 0.25) - 0.5).abs() < 1e-15);
        for k in [-2.0, -1.0, -1e-9, 0.0, 1e-9, 1.0, 2.0] {
            assert!((radial_inverse_cdf(k, 1.0) - 1.0).abs() < 1e-12);
            assert_eq!(radial_inverse_cdf(k, 0.0), 0.0);
            for u in [0.1, 0.5, 0.9] {
                assert!((radial_cdf(k, radial_inverse_cdf(k, u)) - u).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spherical_cap_fraction() {
        let cloud = sample_constant_curvature_disk(1.0, 100_000, 9).unwrap();
        let inside = cloud.coords().iter().filter(|c| c.0 <= 0.5).count() as f64 / 1e5;
        let expected = (1.0 - 0.5f64.cos()) / (1.0 - 1.0f64.cos());
        // Four binomial standard deviations.
        let tol = 4.0 * (expected * (1.0 - expected) / 1e5).sqrt();
        assert!((inside - expected).abs() < tol, "{inside} vs {expected}");
    }

    #[test]
    fn rejects_out_of_range_curvature() {
        assert!(sample_constant_curvature_disk(2.5, 10, 1).is_err());
    }

    #[test]
    fn dataset_shape() {
        let cfg = CurvatureConfig { clouds_per_kappa: 1, points: 5, test_count: 7 };
        let (train, test) = gen_curvature_dataset(&cfg, 4).unwrap();
        assert_eq!(train.len(), 101);
        assert_eq!(test.len(), 7);
        for (i, l) in train.label_values().iter().enumerate() {
            assert!((l - (-2.0 + KAPPA_GRID_STEP * i as f64)).abs() < 1e-12);
        }
        assert!(test.label_values().iter().all(|k| (-2.0..=2.0).contains(k)));
        let cfg = CurvatureConfig { clouds_per_kappa: 10, points: 1, test_count: 1 };
        assert_eq!(gen_curvature_dataset(&cfg, 4).unwrap().0.len(), 1010);
    }
}
