//! Persistence diagrams in degrees 0 and 1 over Z/2.

mod cohomology;
mod diagram;
mod oracle;
mod reduce;
mod unionfind;

pub use cohomology::reduce_cohomology;
pub use diagram::{Interval, PersistenceDiagram};
pub use oracle::{naive_reduction_oracle, ORACLE_SIZE_LIMIT};
pub use reduce::{
    compute_ph, compute_ph_with, diagram_from_pairing, reduce, Pairing, ReductionMethod, AUTO_COHOMOLOGY_CELLS,
};
pub use unionfind::compute_ph0_unionfind;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{rips_complex, weighted_rips_complex, FilteredCubicalGrid, Filtration, RipsOptions};
    use crate::geometry::{euclidean_distance_matrix, DistanceMatrix, PointCloud};
    use proptest::prelude::*;

    fn cloud(flat: &[f64]) -> DistanceMatrix {
        euclidean_distance_matrix(&PointCloud::new(2, flat.to_vec()).unwrap())
    }

    fn all_engines_agree<F: Filtration>(cx: &F) {
        let expected = naive_reduction_oracle(cx, 1).unwrap();
        assert_eq!(compute_ph_with(cx, 1, ReductionMethod::Homology), expected);
        assert_eq!(compute_ph_with(cx, 1, ReductionMethod::Cohomology), expected);
        assert_eq!(compute_ph0_unionfind(cx), expected.restricted(0));
    }

    /// Rank over Z/2 of the boundary columns of dimension `dim` entering by `r`.
    fn boundary_rank(m: &crate::complex::BoundaryMatrix, dim: u8, r: f64) -> usize {
        let mut rows: Vec<Vec<u32>> =
            (0..m.len()).filter(|&j| m.dim(j) == dim && m.value(j) <= r).map(|j| m.column(j).to_vec()).collect();
        let mut rank = 0;
        let mut pivots: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
        for col in rows.iter_mut() {
            let mut set: std::collections::BTreeSet<u32> = col.iter().copied().collect();
            while let Some(&low) = set.iter().next_back() {
                match pivots.get(&low) {
                    Some(p) => {
                        for x in p {
                            if !set.remove(x) {
                                set.insert(*x);
                            }
                        }
                    }
                    None => {
                        pivots.insert(low, set.iter().copied().collect());
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn weighted_rips_engines_agree(
            flat in prop::collection::vec(-1.0f64..1.0, 4..=24),
            weights in prop::collection::vec(0.0f64..0.6, 12),
        ) {
            let flat = &flat[..flat.len() / 2 * 2];
            let m = cloud(flat);
            let cx = weighted_rips_complex(&m, &weights[..m.len()], RipsOptions::default()).unwrap();
            all_engines_agree(&cx);
        }

        #[test]
        fn cubical_engines_agree(side in 1usize..=8, values in prop::collection::vec(prop::option::weighted(0.8, 0u8..6), 64)) {
            let top = values[..side * side]
                .iter()
                .map(|v| v.map_or(f64::INFINITY, f64::from))
                .collect();
            all_engines_agree(&FilteredCubicalGrid::new(side, top).unwrap());
        }

        #[test]
        fn euler_characteristic_of_every_sublevel(flat in prop::collection::vec(-1.0f64..1.0, 4..=20)) {
            let flat = &flat[..flat.len() / 2 * 2];
            let cx = rips_complex(&cloud(flat), RipsOptions::default()).unwrap();
            let m = cx.boundary_matrix();
            let pd = compute_ph(&cx, 1);
            for &r in m.values() {
                let count = |d: u8| (0..m.len()).filter(|&j| m.dim(j) == d && m.value(j) <= r).count() as i64;
                let chi = count(0) - count(1) + count(2);
                let betti2 = count(2) - boundary_rank(&m, 2, r) as i64;
                let (b0, b1) = (pd.betti_at(0, r) as i64, pd.betti_at(1, r) as i64);
                prop_assert_eq!(b0 - b1 + betti2, chi);
            }
            prop_assert_eq!(pd.in_dim(0).filter(|iv| iv.death.is_infinite()).count(), 1);
        }

        #[test]
        fn tied_values_do_not_change_the_diagram(
            levels in prop::collection::vec(1u8..4, 45),
            perm in Just((0..10usize).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let mut entries = vec![0.0; 100];
            let mut k = 0;
            for i in 0..10 {
                for j in i + 1..10 {
                    let v = f64::from(levels[k]);
                    entries[i * 10 + j] = v;
                    entries[j * 10 + i] = v;
                    k += 1;
                }
            }
            let a = DistanceMatrix::new(10, entries.clone()).unwrap();
            let mut permuted = vec![0.0; 100];
            for i in 0..10 {
                for j in 0..10 {
                    permuted[perm[i] * 10 + perm[j]] = entries[i * 10 + j];
                }
            }
            let b = DistanceMatrix::new(10, permuted).unwrap();
            let pa = compute_ph(&rips_complex(&a, RipsOptions::default()).unwrap(), 1);
            let pb = compute_ph(&rips_complex(&b, RipsOptions::default()).unwrap(), 1);
            prop_assert_eq!(pa, pb);
        }
    }
}
