//! Fixed inputs shared by the benchmarks.

use std::f64::consts::TAU;

use tda_lab::{BinaryMask, PointCloud};

/// `n` points evenly spaced on the unit circle.
pub fn circle(n: usize) -> PointCloud {
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    PointCloud::from_2d(&pts).expect("finite points")
}

/// An annulus drawn on a `side` x `side` grid.
pub fn annulus_mask(side: usize) -> BinaryMask {
    let c = side as f64 / 2.0;
    let cells = (0..side * side)
        .map(|i| {
            let (x, y) = ((i % side) as f64 + 0.5 - c, (i / side) as f64 + 0.5 - c);
            let r = (x * x + y * y).sqrt() / c;
            (0.4..0.9).contains(&r)
        })
        .collect();
    BinaryMask::from_cells(side, cells).expect("square grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_well_formed() {
        assert_eq!(circle(12).len(), 12);
        assert_eq!(annulus_mask(20).component_count(), 1);
    }
}
