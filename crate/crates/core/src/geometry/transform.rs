use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::PointCloud;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Translation,
    Rotation,
    Stretch,
    Shear,
    Gaussian,
    Outliers,
}

impl TransformKind {
    pub const ALL: [TransformKind; 6] = [
        TransformKind::Translation,
        TransformKind::Rotation,
        TransformKind::Stretch,
        TransformKind::Shear,
        TransformKind::Gaussian,
        TransformKind::Outliers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Translation => "translation",
            TransformKind::Rotation => "rotation",
            TransformKind::Stretch => "stretch",
            TransformKind::Shear => "shear",
            TransformKind::Gaussian => "gaussian",
            TransformKind::Outliers => "outliers",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TransformKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown transform kind '{s}'")))
    }
}

/// A transform family with the range its magnitude is drawn from.
///
/// Default ranges: translation offsets in [-1, 1] per axis, clockwise
/// rotation in [-20, 20] degrees, x-stretch in [0.8, 1.2], shear in
/// [-0.2, 0.2], Gaussian noise standard deviation in [0, 0.1], and an
/// outlier fraction in [0, 0.1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: TransformKind,
    pub range: (f64, f64),
}

impl TransformSpec {
    pub fn standard(kind: TransformKind) -> Self {
        let range = match kind {
            TransformKind::Translation => (-1.0, 1.0),
            TransformKind::Rotation => (-20.0, 20.0),
            TransformKind::Stretch => (0.8, 1.2),
            TransformKind::Shear => (-0.2, 0.2),
            TransformKind::Gaussian => (0.0, 0.1),
            TransformKind::Outliers => (0.0, 0.1),
        };
        Self { kind, range }
    }

    pub fn with_range(kind: TransformKind, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::invalid(format!("bad range [{lo}, {hi}] for {kind}")));
        }
        if matches!(kind, TransformKind::Gaussian | TransformKind::Outliers) && (lo < 0.0 || hi > 1.0) {
            return Err(Error::invalid(format!("{kind} magnitude must lie in [0, 1]")));
        }
        Ok(Self { kind, range: (lo, hi) })
    }

    fn draw_scalar(&self, rng: &mut Rng) -> f64 {
        let (lo, hi) = self.range;
        if lo == hi {
            lo
        } else {
            rng.random_range(lo..hi)
        }
    }

    /// Draws the concrete parameters of one transform.
    pub fn draw(&self, dim: usize, rng: &mut Rng) -> Transform {
        match self.kind {
            TransformKind::Translation => Transform::Translation((0..dim).map(|_| self.draw_scalar(rng)).collect()),
            TransformKind::Rotation => Transform::Rotation { degrees: self.draw_scalar(rng) },
            TransformKind::Stretch => Transform::Stretch { factor: self.draw_scalar(rng) },
            TransformKind::Shear => Transform::Shear { factor: self.draw_scalar(rng) },
            TransformKind::Gaussian => Transform::Gaussian { sigma: self.draw_scalar(rng) },
            TransformKind::Outliers => Transform::Outliers { fraction: self.draw_scalar(rng) },
        }
    }
}

/// A transform with its parameters fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Transform {
    Translation(Vec<f64>),
    /// Clockwise in the xy-plane.
    Rotation {
        degrees: f64,
    },
    /// Scales x only.
    Stretch {
        factor: f64,
    },
    /// `y += factor * x`: with factor 1 a horizontal line turns to 45 degrees.
    Shear {
        factor: f64,
    },
    Gaussian {
        sigma: f64,
    },
    /// Replaces `round(fraction n)` random points by uniform draws from the
    /// cloud's bounding box.
    Outliers {
        fraction: f64,
    },
}

impl Transform {
    pub fn apply(&self, cloud: &PointCloud, rng: &mut Rng) -> Result<PointCloud> {
        match self {
            Transform::Translation(offset) => {
                if offset.len() != cloud.dim() {
                    return Err(Error::invalid("translation dimension mismatch"));
                }
                cloud.map_points(|p| p.iter_mut().zip(offset).for_each(|(c, o)| *c += o))
            }
            Transform::Rotation { degrees } => {
                let (s, c) = degrees.to_radians().sin_cos();
                cloud.map_points(|p| {
                    let (x, y) = (p[0], p[1]);
                    p[0] = c * x + s * y;
                    p[1] = -s * x + c * y;
                })
            }
            Transform::Stretch { factor } => cloud.map_points(|p| p[0] *= factor),
            Transform::Shear { factor } => cloud.map_points(|p| p[1] += factor * p[0]),
            Transform::Gaussian { sigma } => {
                if *sigma == 0.0 {
                    return Ok(cloud.clone());
                }
                let normal = Normal::new(0.0, *sigma).map_err(|e| Error::invalid(e.to_string()))?;
                cloud.map_points(|p| p.iter_mut().for_each(|c| *c += normal.sample(rng)))
            }
            Transform::Outliers { fraction } => {
                let n = cloud.len();
                let count = ((fraction * n as f64).round() as usize).min(n);
                if count == 0 {
                    return Ok(cloud.clone());
                }
                let (lo, hi) = cloud.bounds();
                let dim = cloud.dim();
                let mut coords = cloud.coords().to_vec();
                for i in sample(rng, n, count).into_iter() {
                    for a in 0..dim {
                        coords[i * dim + a] = if lo[a] < hi[a] { rng.random_range(lo[a]..hi[a]) } else { lo[a] };
                    }
                }
                PointCloud::new(dim, coords)
            }
        }
    }
}

/// Draws a transform from `spec` and applies it, all from one seeded stream.
pub fn apply_transform(cloud: &PointCloud, spec: &TransformSpec, seed: u64) -> Result<PointCloud> {
    let mut rng = rng_from_seed(seed);
    let t = spec.draw(cloud.dim(), &mut rng);
    t.apply(cloud, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::euclidean_distance_matrix;

    fn sample_cloud(dim: usize) -> PointCloud {
        let coords: Vec<f64> = (0..30 * dim).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        PointCloud::new(dim, coords).unwrap()
    }

    #[test]
    fn unit_stretch_and_zero_outliers_are_identity() {
        let cloud = sample_cloud(2);
        let stretch = TransformSpec::with_range(TransformKind::Stretch, 1.0, 1.0).unwrap();
        assert_eq!(apply_transform(&cloud, &stretch, 1).unwrap(), cloud);
        let outliers = TransformSpec::with_range(TransformKind::Outliers, 0.0, 0.0).unwrap();
        assert_eq!(apply_transform(&cloud, &outliers, 1).unwrap(), cloud);
    }

    #[test]
    fn rotation_is_clockwise_by_the_drawn_angle() {
        let cloud = PointCloud::from_2d(&[[1.0, 0.0]]).unwrap();
        let spec = TransformSpec::standard(TransformKind::Rotation);
        let seed = 77;
        let Transform::Rotation { degrees } = spec.draw(2, &mut rng_from_seed(seed)) else { unreachable!() };
        assert!((-20.0..20.0).contains(&degrees));
        let theta = degrees.to_radians();
        // clockwise rotation matrix [[cos, sin], [-sin, cos]]
        let want = [theta.cos(), -theta.sin()];
        let got = apply_transform(&cloud, &spec, seed).unwrap();
        assert!((got.point(0)[0] - want[0]).abs() < 1e-15);
        assert!((got.point(0)[1] - want[1]).abs() < 1e-15);
    }

    #[test]
    fn shear_of_one_turns_horizontal_to_diagonal() {
        let cloud = PointCloud::from_2d(&[[0.0, 2.0], [1.0, 2.0]]).unwrap();
        let out = Transform::Shear { factor: 1.0 }.apply(&cloud, &mut rng_from_seed(0)).unwrap();
        assert_eq!(out.point(1)[1] - out.point(0)[1], 1.0);
    }

    #[test]
    fn isometries_preserve_distances() {
        for dim in [2, 3] {
            let cloud = sample_cloud(dim);
            let before = euclidean_distance_matrix(&cloud);
            for kind in [TransformKind::Translation, TransformKind::Rotation] {
                for seed in 0..5 {
                    let after = euclidean_distance_matrix(
                        &apply_transform(&cloud, &TransformSpec::standard(kind), seed).unwrap(),
                    );
                    for i in 0..cloud.len() {
                        for j in 0..cloud.len() {
                            assert!((before.get(i, j) - after.get(i, j)).abs() < 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn outliers_stay_in_bounding_box() {
        let cloud = sample_cloud(3);
        let spec = TransformSpec::with_range(TransformKind::Outliers, 0.5, 0.5).unwrap();
        let out = apply_transform(&cloud, &spec, 4).unwrap();
        let (lo, hi) = cloud.bounds();
        let changed = (0..cloud.len()).filter(|&i| out.point(i) != cloud.point(i)).count();
        assert_eq!(changed, 15);
        for p in out.points() {
            for a in 0..3 {
                assert!(p[a] >= lo[a] && p[a] <= hi[a]);
            }
        }
    }

    #[test]
    fn unknown_kind_is_rejected() {
        assert!("skew".parse::<TransformKind>().is_err());
        assert_eq!("shear".parse::<TransformKind>().unwrap(), TransformKind::Shear);
    }
}
