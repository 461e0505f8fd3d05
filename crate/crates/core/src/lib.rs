//! Shape analysis with persistent homology.
//!
//! The crate detects three properties of shapes sampled as point clouds or
//! rasterized into binary masks:
//!
//! * the number of one-dimensional holes, from distance-to-measure weighted
//!   Rips filtrations;
//! * the curvature of constant-curvature disks, from Rips filtrations on
//!   geodesic distances;
//! * convexity, from cubical complexes filtered by the distance to a line
//!   (tubular filtrations). A shape is convex exactly when every tubular
//!   filtration has a single degree-0 interval.
//!
//! Data flows through the modules in order: [`geometry`] and [`datagen`]
//! produce clouds and masks, [`complex`] builds filtered complexes,
//! [`persistence`] reduces them to diagrams, [`signatures`] vectorizes the
//! diagrams and [`learn`] fits the small models used by the experiment
//! [`pipelines`]. [`io`] holds every on-disk format.

pub mod complex;
pub mod datagen;
pub mod error;
pub mod geometry;
pub mod io;
pub mod learn;
pub mod persistence;
pub mod pipelines;
pub mod rng;
pub mod signatures;

pub use complex::{CubicalFunction, FilteredComplex, FilteredCubicalGrid, Filtration};
pub use datagen::{Label, LabeledDataset};
pub use error::{Error, Result};
pub use geometry::{BinaryMask, DistanceMatrix, Line, PointCloud, PolarCloud, Polygon};
pub use persistence::{Interval, PersistenceDiagram};
pub use signatures::{SignatureScheme, SignatureVector};
