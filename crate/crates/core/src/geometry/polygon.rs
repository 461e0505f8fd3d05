use serde::{Deserialize, Serialize};

use super::Point2;
use crate::error::{Error, Result};

/// A simple polygon with counter-clockwise vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

pub(crate) fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (p, q) = (v[i], v[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        / 2.0
}

fn on_segment(p: Point2, a: Point2, b: Point2) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

impl Polygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Degenerate(format!("polygon needs 3 vertices, got {}", vertices.len())));
        }
        if !vertices.iter().flatten().all(|c| c.is_finite()) {
            return Err(Error::invalid("non-finite polygon vertex"));
        }
        if signed_area(&vertices) <= 0.0 {
            return Err(Error::Degenerate("polygon is not counter-clockwise".into()));
        }
        let polygon = Self { vertices };
        if !polygon.is_simple() {
            return Err(Error::Degenerate("polygon self-intersects".into()));
        }
        Ok(polygon)
    }

    /// Accepts either orientation and reverses clockwise input.
    pub fn new_any_orientation(mut vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() >= 3 && signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Self::new(vertices)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Every non-adjacent pair of edges is disjoint.
    fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        let v = &self.vertices;
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                    return false;
                }
            }
        }
        true
    }

    /// True when every turn is a left turn (within a zero tolerance).
    pub fn is_convex(&self) -> bool {
        self.turns().all(|c| c >= 0.0)
    }

    /// Cross products of consecutive edges, one per vertex.
    pub fn turns(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.vertices.len();
        let v = &self.vertices;
        (0..n).map(move |i| cross(v[(i + n - 1) % n], v[i], v[(i + 1) % n]))
    }

    pub fn centroid(&self) -> Point2 {
        let v = &self.vertices;
        let n = v.len();
        let a = signed_area(v);
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let (p, q) = (v[i], v[(i + 1) % n]);
            let w = p[0] * q[1] - q[0] * p[1];
            cx += (p[0] + q[0]) * w;
            cy += (p[1] + q[1]) * w;
        }
        [cx / (6.0 * a), cy / (6.0 * a)]
    }

    pub fn bounds(&self) -> (Point2, Point2) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.vertices {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        (lo, hi)
    }

    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Result<Self> {
        Self::new_any_orientation(self.vertices.iter().map(|&p| f(p)).collect())
    }
}

/// Andrew's monotone chain. Collinear boundary points are dropped, so the
/// output holds only extreme vertices, counter-clockwise from the lowest-left.
pub fn convex_hull(points: &[Point2]) -> Result<Polygon> {
    let mut pts: Vec<Point2> = points.to_vec();
    if !pts.iter().flatten().all(|c| c.is_finite()) {
        return Err(Error::invalid("non-finite point"));
    }
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::Degenerate("fewer than 3 distinct points".into()));
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    Polygon::new(hull)
}

pub fn polygon_area(p: &Polygon) -> f64 {
    signed_area(p.vertices())
}

/// Crossing-number test; points on the boundary count as inside.
pub fn point_in_polygon(q: Point2, p: &Polygon) -> bool {
    let mut inside = false;
    for (a, b) in p.edges() {
        if cross(a, b, q) == 0.0 && on_segment(q, a, b) {
            return true;
        }
        if (a[1] > q[1]) != (b[1] > q[1]) {
            let x = a[0] + (q[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if q[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn square() -> Polygon {
        Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(Polygon::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        // clockwise
        assert!(Polygon::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).is_err());
        // bow tie
        assert!(Polygon::new_any_orientation(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(Polygon::new_any_orientation(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).is_ok());
    }

    #[test]
    fn hull_of_square_with_center() {
        let hull = convex_hull(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]).unwrap();
        let mut v = hull.vertices().to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(v, vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]);
    }

    #[test]
    fn hull_of_convex_ccw_input_keeps_vertex_set() {
        let pts: Vec<Point2> = (0..7)
            .map(|i| {
                let t = i as f64 * std::f64::consts::TAU / 7.0;
                [t.cos(), t.sin()]
            })
            .collect();
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.len(), 7);
        for p in &pts {
            assert!(hull.vertices().contains(p));
        }
    }

    #[test]
    fn hull_rejects_collinear() {
        assert!(matches!(convex_hull(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]), Err(Error::Degenerate(_))));
        assert!(convex_hull(&[[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]]).is_err());
    }

    /// An ordered pair (a, b) is a hull edge when every other point lies
    /// strictly to its left, or on the segment between them.
    fn brute_force_hull_vertices(pts: &[Point2]) -> Vec<Point2> {
        let mut out = Vec::new();
        for (i, &a) in pts.iter().enumerate() {
            for (j, &b) in pts.iter().enumerate() {
                if i == j {
                    continue;
                }
                let ok = pts.iter().enumerate().all(|(k, &c)| k == i || k == j || cross(a, b, c) > 0.0);
                if ok {
                    out.push(a);
                    out.push(b);
                }
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    #[test]
    fn hull_matches_brute_force() {
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let pts: Vec<Point2> = (0..50).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
            let hull = convex_hull(&pts).unwrap();
            let mut got = hull.vertices().to_vec();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(got, brute_force_hull_vertices(&pts));
            assert!(pts.iter().all(|&p| point_in_polygon(p, &hull)));
            assert!(hull.is_convex());
        }
    }

    #[test]
    fn area_and_containment() {
        assert_eq!(polygon_area(&square()), 1.0);
        let tri = Polygon::new(vec![[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]]).unwrap();
        assert!(point_in_polygon([1.0, 1.0], &tri));
        assert!(point_in_polygon([1.5, 1.5], &tri));
        assert!(point_in_polygon([0.0, 0.0], &tri));
        assert!(!point_in_polygon([2.0, 2.0], &tri));
        assert!(point_in_polygon([0.0, 0.5], &square()));
        assert!(point_in_polygon([1.0, 1.0], &square()));
        assert_eq!(tri.centroid(), [1.0, 1.0]);
    }

    fn winding_number(q: Point2, p: &Polygon) -> i32 {
        let mut w = 0;
        for (a, b) in p.edges() {
            if a[1] <= q[1] {
                if b[1] > q[1] && cross(a, b, q) > 0.0 {
                    w += 1;
                }
            } else if b[1] <= q[1] && cross(a, b, q) < 0.0 {
                w -= 1;
            }
        }
        w
    }

    #[test]
    fn containment_matches_winding_number() {
        let star: Vec<Point2> = (0..10)
            .map(|i| {
                let r = if i % 2 == 0 { 1.0 } else { 0.4 };
                let t = i as f64 * std::f64::consts::TAU / 10.0 + 0.1;
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        let star = Polygon::new(star).unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..1000 {
            let q = [rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2)];
            assert_eq!(point_in_polygon(q, &star), winding_number(q, &star) != 0, "{q:?}");
        }
    }
}
