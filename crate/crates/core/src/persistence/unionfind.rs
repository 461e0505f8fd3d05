use super::diagram::{Interval, PersistenceDiagram};
use crate::complex::Filtration;

/// Disjoint sets over filtration indices; each root remembers the oldest
/// vertex of its component.
struct Components {
    parent: Vec<u32>,
    rank: Vec<u8>,
    eldest: Vec<u32>,
}

impl Components {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), rank: vec![0; n], eldest: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    /// Joins two roots and returns the eldest vertex of the component that
    /// dies, i.e. the younger of the two.
    fn merge(&mut self, a: u32, b: u32) -> u32 {
        let (ea, eb) = (self.eldest[a as usize], self.eldest[b as usize]);
        let (survivor_eldest, younger) = if ea < eb { (ea, eb) } else { (eb, ea) };
        let (hi, lo) = if self.rank[a as usize] >= self.rank[b as usize] { (a, b) } else { (b, a) };
        self.parent[lo as usize] = hi;
        if self.rank[hi as usize] == self.rank[lo as usize] {
            self.rank[hi as usize] += 1;
        }
        self.eldest[hi as usize] = survivor_eldest;
        younger
    }
}

/// Degree-0 persistence by processing edges in filtration order. On each
/// merge the younger component dies (elder rule); age is the filtration
/// index of a component's first vertex.
pub fn compute_ph0_unionfind<F: Filtration + ?Sized>(cx: &F) -> PersistenceDiagram {
    let m = cx.boundary_matrix();
    let mut sets = Components::new(m.len());
    let mut intervals = Vec::new();
    let mut vertices = Vec::new();
    for j in 0..m.len() {
        match m.dim(j) {
            0 => vertices.push(j as u32),
            1 => {
                let c = m.column(j);
                let (a, b) = (sets.find(c[0]), sets.find(c[1]));
                if a != b {
                    let dying = sets.merge(a, b);
                    let (birth, death) = (m.value(dying as usize), m.value(j));
                    if death > birth {
                        intervals.push(Interval::new(0, birth, death));
                    }
                }
            }
            _ => {}
        }
    }
    for v in vertices {
        if sets.find(v) == v {
            let eldest = sets.eldest[v as usize] as usize;
            intervals.push(Interval::new(0, m.value(eldest), f64::INFINITY));
        }
    }
    PersistenceDiagram::new(intervals).expect("filtration values are ordered")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{rips_complex, RipsOptions};
    use crate::geometry::{euclidean_distance_matrix, PointCloud};

    #[test]
    fn chain_of_three() {
        let m = euclidean_distance_matrix(&PointCloud::from_2d(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]).unwrap());
        let pd = compute_ph0_unionfind(&rips_complex(&m, RipsOptions::default()).unwrap());
        assert_eq!(
            pd.intervals(),
            &[Interval::new(0, 0.0, 1.0), Interval::new(0, 0.0, 2.0), Interval::new(0, 0.0, f64::INFINITY)]
        );
    }
}
