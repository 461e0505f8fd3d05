//! Seeded generators for the labeled corpora.
//!
//! Item `i` of a dataset draws all its randomness from
//! `derive_seed(master, stream::ITEM, i)`, so any single item can be
//! regenerated without the others.

mod convexity;
mod curvature;
mod holes;

pub use convexity::{
    gen_convexity_dataset, gen_mask_corpus, gen_random_concave_polygon, gen_random_convex_polygon, indentation_depth,
    sample_shape, ConvexityKind, MaskCorpusConfig, Shape, CONCAVE_CHECK_SIDE, CONCAVE_RETRIES,
};
pub use curvature::{
    gen_curvature_dataset, radial_cdf, radial_inverse_cdf, sample_constant_curvature_disk, CurvatureConfig,
    KAPPA_GRID_STEP,
};
pub use holes::{gen_holes_dataset, HoleRegion, HOLE_COUNTS, SLAB_HEIGHT};

use serde::{Deserialize, Serialize};

/// Integer class or real-valued target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Class(i64),
    Value(f64),
}

impl Label {
    pub fn as_f64(self) -> f64 {
        match self {
            Label::Class(c) => c as f64,
            Label::Value(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub generator: String,
    pub seed: u64,
    pub item_seeds: Vec<u64>,
    pub shape_ids: Vec<String>,
    /// Generator parameters, echoed for the manifest.
    pub params: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset<T> {
    pub items: Vec<T>,
    pub labels: Vec<Label>,
    pub meta: DatasetMeta,
}

impl<T> LabeledDataset<T> {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn label_values(&self) -> Vec<f64> {
        self.labels.iter().map(|l| l.as_f64()).collect()
    }

    /// Items at `indices`, in that order, with their labels and metadata.
    pub fn subset(&self, indices: &[usize]) -> Self
    where
        T: Clone,
    {
        let meta = DatasetMeta {
            item_seeds: indices.iter().map(|&i| self.meta.item_seeds[i]).collect(),
            shape_ids: indices.iter().map(|&i| self.meta.shape_ids[i].clone()).collect(),
            ..self.meta.clone()
        };
        LabeledDataset {
            items: indices.iter().map(|&i| self.items[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            meta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_serialize_untagged() {
        let s = serde_json::to_string(&[Label::Class(4), Label::Value(-0.5)]).unwrap();
        assert_eq!(s, "[4,-0.5]");
        let back: Vec<Label> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![Label::Class(4), Label::Value(-0.5)]);
    }
}
