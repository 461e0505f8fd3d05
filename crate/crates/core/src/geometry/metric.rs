use rand::Rng as _;

use super::{check_curvature, DistanceMatrix, Line, Point2, PointCloud, PolarCloud};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn euclidean_distance_matrix(cloud: &PointCloud) -> DistanceMatrix {
    DistanceMatrix::from_fn(cloud.len(), |i, j| euclid(cloud.point(i), cloud.point(j)))
}

/// Geodesic distance between two points given in geodesic polar
/// coordinates on a surface of constant curvature `kappa`.
///
/// The three laws of cosines are evaluated in half-angle form so that
/// nearby points keep full relative precision:
/// `sin^2(d/2R) = sin^2((a-b)/2R) + sin(a/R) sin(b/R) sin^2(dphi/2)` on the
/// sphere, the `sinh` analogue on the hyperbolic plane, and
/// `d^2 = (a-b)^2 + 4ab sin^2(dphi/2)` in the plane.
pub fn geodesic_distance(kappa: f64, (r1, p1): (f64, f64), (r2, p2): (f64, f64)) -> f64 {
    let s = ((p1 - p2) / 2.0).sin();
    let s2 = s * s;
    if kappa > 0.0 {
        let radius = 1.0 / kappa.sqrt();
        let (a, b) = (r1 / radius, r2 / radius);
        let h = ((a - b) / 2.0).sin().powi(2) + a.sin() * b.sin() * s2;
        2.0 * radius * h.clamp(0.0, 1.0).sqrt().asin()
    } else if kappa < 0.0 {
        let radius = 1.0 / (-kappa).sqrt();
        let (a, b) = (r1 / radius, r2 / radius);
        let h = ((a - b) / 2.0).sinh().powi(2) + a.sinh() * b.sinh() * s2;
        2.0 * radius * h.max(0.0).sqrt().asinh()
    } else {
        ((r1 - r2).powi(2) + 4.0 * r1 * r2 * s2).max(0.0).sqrt()
    }
}

pub fn geodesic_distance_matrix(cloud: &PolarCloud) -> Result<DistanceMatrix> {
    let kappa = cloud.curvature();
    check_curvature(kappa)?;
    let c = cloud.coords();
    Ok(DistanceMatrix::from_fn(c.len(), |i, j| geodesic_distance(kappa, c[i], c[j])))
}

fn neighbor_count(m: f64, n: usize) -> Result<usize> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::invalid(format!("DTM mass fraction {m} outside (0, 1]")));
    }
    let k = (m * n as f64).ceil() as usize;
    Ok(k.clamp(1, n.saturating_sub(1).max(1)))
}

/// Root mean square of the `k` smallest entries of `row`, skipping `skip`.
fn rms_of_nearest(row: &[f64], skip: usize, k: usize, scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend(row.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &d)| d));
    if scratch.is_empty() {
        return 0.0;
    }
    let k = k.min(scratch.len());
    scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
    (scratch[..k].iter().map(|d| d * d).sum::<f64>() / k as f64).sqrt()
}

/// Distance to measure: at each point, the root mean square of the
/// distances to its `ceil(m n)` nearest other points.
pub fn dtm(matrix: &DistanceMatrix, m: f64) -> Result<Vec<f64>> {
    let n = matrix.len();
    let k = neighbor_count(m, n)?;
    let mut scratch = Vec::with_capacity(n);
    Ok((0..n).map(|i| rms_of_nearest(matrix.row(i), i, k, &mut scratch)).collect())
}

/// Distance to measure of the cloud points at `subset`, with neighbors
/// taken from the whole cloud. Used when the complex is built on a
/// subsample but the measure should stay that of the full sample.
pub fn dtm_subset(cloud: &PointCloud, subset: &[usize], m: f64) -> Result<Vec<f64>> {
    let n = cloud.len();
    let k = neighbor_count(m, n)?;
    let mut row = vec![0.0; n];
    let mut scratch = Vec::with_capacity(n);
    subset
        .iter()
        .map(|&i| {
            if i >= n {
                return Err(Error::invalid(format!("subset index {i} out of range")));
            }
            let p = cloud.point(i);
            for (j, q) in cloud.points().enumerate() {
                row[j] = euclid(p, q);
            }
            Ok(rms_of_nearest(&row, i, k, &mut scratch))
        })
        .collect()
}

pub fn tubular_distance(point: Point2, line: &Line) -> f64 {
    let [ax, ay] = line.anchor();
    let [dx, dy] = line.direction();
    ((point[0] - ax) * dy - (point[1] - ay) * dx).abs()
}

pub fn height(point: &[f64], direction: &[f64]) -> f64 {
    point.iter().zip(direction).map(|(a, b)| a * b).sum()
}

pub fn absolute_height(point: &[f64], direction: &[f64]) -> f64 {
    height(point, direction).abs()
}

/// Greedy maximin selection. The first index is drawn from `seed`; each
/// further index maximizes the distance to the chosen set, ties going to
/// the smallest index.
pub fn farthest_point_indices(cloud: &PointCloud, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = cloud.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("cannot select {k} of {n} points")));
    }
    let first = rng_from_seed(seed).random_range(0..n);
    let mut chosen = Vec::with_capacity(k);
    let mut gap = vec![f64::INFINITY; n];
    let mut next = first;
    for _ in 0..k {
        chosen.push(next);
        let p = cloud.point(next);
        gap[next] = f64::NEG_INFINITY;
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for (j, q) in cloud.points().enumerate() {
            if gap[j] == f64::NEG_INFINITY {
                continue;
            }
            gap[j] = gap[j].min(euclid(p, q));
            if gap[j] > best.0 {
                best = (gap[j], j);
            }
        }
        next = best.1;
    }
    Ok(chosen)
}

pub fn farthest_point_subsample(cloud: &PointCloud, k: usize, seed: u64) -> Result<PointCloud> {
    cloud.select(&farthest_point_indices(cloud, k, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn cloud2(points: &[Point2]) -> PointCloud {
        PointCloud::from_2d(points).unwrap()
    }

    #[test]
    fn euclidean_examples() {
        let m = euclidean_distance_matrix(&cloud2(&[[0.0, 0.0], [3.0, 4.0]]));
        assert_eq!(m.get(0, 1), 5.0);
        assert_eq!(m.get(1, 0), 5.0);

        let single = euclidean_distance_matrix(&cloud2(&[[1.0, 2.0]]));
        assert_eq!(single.len(), 1);
        assert_eq!(single.get(0, 0), 0.0);

        let line = euclidean_distance_matrix(&cloud2(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]));
        assert_eq!([line.get(0, 1), line.get(1, 2), line.get(0, 2)], [1.0, 2.0, 3.0]);
    }

    #[test]
    fn geodesic_pole_examples() {
        for kappa in [0.0, 1.0, -1.0] {
            let d = geodesic_distance(kappa, (0.5, 0.0), (0.5, PI));
            assert_abs_diff_eq!(d, 1.0, epsilon = 1e-12);
        }
    }

    /// Great-circle arc length by summing chords of a fine slerp, for two
    /// points at colatitude 0.5 and longitudes 0 and pi/2 on the unit sphere.
    #[test]
    fn spherical_quarter_turn_matches_integrated_arc() {
        let embed = |theta: f64, phi: f64| [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let a = embed(0.5, 0.0);
        let b = embed(0.5, FRAC_PI_2);
        let steps = 20_000;
        let mut length = 0.0;
        let mut prev = a;
        for s in 1..=steps {
            let t = s as f64 / steps as f64;
            let raw: Vec<f64> = (0..3).map(|i| a[i] * (1.0 - t) + b[i] * t).collect();
            let norm = raw.iter().map(|c| c * c).sum::<f64>().sqrt();
            let cur = [raw[0] / norm, raw[1] / norm, raw[2] / norm];
            length += euclid(&prev, &cur);
            prev = cur;
        }
        let d = geodesic_distance(1.0, (0.5, 0.0), (0.5, FRAC_PI_2));
        assert_abs_diff_eq!(d, length, epsilon = 1e-8);
        assert_abs_diff_eq!(d.cos(), 0.5f64.cos().powi(2), epsilon = 1e-12);
    }

    #[test]
    fn rejects_out_of_range_curvature() {
        let cloud = PolarCloud::new(vec![(0.1, 0.0)], 1.0).unwrap();
        assert!(geodesic_distance_matrix(&cloud).is_ok());
        assert!(PolarCloud::new(vec![(0.1, 0.0)], 2.5).is_err());
    }

    #[test]
    fn dtm_single_neighbor_is_nearest_distance() {
        let m = euclidean_distance_matrix(&cloud2(&[[0.0, 0.0], [2.0, 0.0]]));
        assert_eq!(dtm(&m, 0.5).unwrap(), vec![2.0, 2.0]);
        let m = euclidean_distance_matrix(&cloud2(&[[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]]));
        assert_eq!(dtm(&m, 0.1).unwrap(), vec![1.0, 1.0, 4.0]);
        assert!(dtm(&m, 0.0).is_err());
        assert!(dtm(&m, 1.5).is_err());
    }

    #[test]
    fn dtm_matches_exhaustive_sort() {
        let pts: Vec<Point2> = (0..10).map(|i| [i as f64 * 0.5, (i % 3) as f64]).collect();
        let cloud = cloud2(&pts);
        let m = euclidean_distance_matrix(&cloud);
        let got = dtm(&m, 0.3).unwrap();
        for (i, &g) in got.iter().enumerate() {
            let mut d: Vec<f64> = (0..10).filter(|&j| j != i).map(|j| m.get(i, j)).collect();
            d.sort_by(f64::total_cmp);
            let want = (d[..3].iter().map(|x| x * x).sum::<f64>() / 3.0).sqrt();
            assert_abs_diff_eq!(g, want, epsilon = 1e-15);
        }
        let all: Vec<usize> = (0..10).collect();
        assert_eq!(dtm_subset(&cloud, &all, 0.3).unwrap(), got);
    }

    #[test]
    fn tubular_examples() {
        let x_axis = Line::new([0.0, 0.0], [1.0, 0.0]).unwrap();
        assert_eq!(tubular_distance([3.0, 4.0], &x_axis), 4.0);
        assert_eq!(tubular_distance([-7.0, 0.0], &x_axis), 0.0);
        let diag = Line::new([0.0, 0.0], [1.0, 1.0]).unwrap();
        // projection of (1,0) onto y=x is (1/2,1/2)
        let foot = [0.5, 0.5];
        let want = (1.0f64 - foot[0]).hypot(0.0 - foot[1]);
        assert_abs_diff_eq!(tubular_distance([1.0, 0.0], &diag), want, epsilon = 1e-15);
        assert_abs_diff_eq!(want, SQRT_2 / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn height_examples() {
        assert_eq!(height(&[0.0, 5.0], &[0.0, 1.0]), 5.0);
        assert_eq!(height(&[3.0, -2.0], &[1.0, 0.0]), 3.0);
        assert_eq!(absolute_height(&[3.0, -2.0], &[1.0, 0.0]), 3.0);
        assert_eq!(height(&[1.0, -1.0], &[0.0, 1.0]), -1.0);
        assert_eq!(absolute_height(&[1.0, -1.0], &[0.0, 1.0]), 1.0);
    }

    #[test]
    fn farthest_point_examples() {
        let cloud = cloud2(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]);
        let mut all = farthest_point_indices(&cloud, 5, 3).unwrap();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3, 4]);
        assert_eq!(farthest_point_indices(&cloud, 1, 3).unwrap().len(), 1);
        assert!(farthest_point_indices(&cloud, 6, 3).is_err());

        // whichever corner comes first, the greedy rule takes the opposite
        // corner next and then the remaining two; a center seed reaches all
        // corners after it.
        for seed in 0..40 {
            let idx = farthest_point_indices(&cloud, 4, seed).unwrap();
            if idx[0] != 4 {
                let mut s = idx.clone();
                s.sort_unstable();
                assert_eq!(s, vec![0, 1, 2, 3], "seed {seed}");
                assert_eq!(idx[1], (idx[0] + 2) % 4);
            }
        }
    }

    #[test]
    fn farthest_point_is_deterministic() {
        let pts: Vec<Point2> = (0..50).map(|i| [(i as f64 * 0.37).sin(), (i as f64 * 0.91).cos()]).collect();
        let cloud = cloud2(&pts);
        assert_eq!(farthest_point_subsample(&cloud, 12, 9).unwrap(), farthest_point_subsample(&cloud, 12, 9).unwrap());
    }
}
