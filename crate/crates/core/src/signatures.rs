//! Fixed-length vectorizations of persistence diagrams.
//!
//! Only finite intervals of the requested degree contribute. Schemes that
//! need a coordinate range (images, landscapes, padded lifespans) are
//! fitted on a training set of diagrams and then applied unchanged.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::persistence::{Interval, PersistenceDiagram};

fn finite(pd: &PersistenceDiagram, dim: u8) -> impl Iterator<Item = &Interval> + '_ {
    pd.in_dim(dim).filter(|iv| iv.is_finite())
}

/// Weight applied to each Gaussian bump of a persistence image, as a
/// function of the interval's lifespan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageWeight {
    One,
    Lifespan,
    LifespanSquared,
}

impl ImageWeight {
    pub fn eval(self, lifespan: f64) -> f64 {
        match self {
            ImageWeight::One => 1.0,
            ImageWeight::Lifespan => lifespan,
            ImageWeight::LifespanSquared => lifespan * lifespan,
        }
    }
}

impl fmt::Display for ImageWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImageWeight::One => "1",
            ImageWeight::Lifespan => "y",
            ImageWeight::LifespanSquared => "y2",
        })
    }
}

/// Persistence image on a `resolution x resolution` grid over the
/// (birth, lifespan) plane. Output is row-major with lifespan rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageScheme {
    pub dim: u8,
    pub resolution: usize,
    pub sigma: f64,
    pub weight: ImageWeight,
    pub birth_range: (f64, f64),
    pub lifespan_range: (f64, f64),
}

impl ImageScheme {
    pub fn new(
        dim: u8,
        resolution: usize,
        sigma: f64,
        weight: ImageWeight,
        birth_range: (f64, f64),
        lifespan_range: (f64, f64),
    ) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("image bandwidth must be positive, got {sigma}")));
        }
        if resolution == 0 {
            return Err(Error::invalid("image resolution must be at least 1"));
        }
        for (lo, hi) in [birth_range, lifespan_range] {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::invalid(format!("image range ({lo}, {hi}) is empty")));
            }
        }
        Ok(Self { dim, resolution, sigma, weight, birth_range, lifespan_range })
    }

    /// Births span their observed minimum to maximum and lifespans run from
    /// zero to their observed maximum. A range of zero width is widened by
    /// `sigma` on each side.
    pub fn fit(
        diagrams: &[PersistenceDiagram],
        dim: u8,
        resolution: usize,
        sigma: f64,
        weight: ImageWeight,
    ) -> Result<Self> {
        let (mut b_lo, mut b_hi, mut l_hi) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for iv in diagrams.iter().flat_map(|pd| finite(pd, dim)) {
            b_lo = b_lo.min(iv.birth);
            b_hi = b_hi.max(iv.birth);
            l_hi = l_hi.max(iv.lifespan());
        }
        if b_lo > b_hi {
            (b_lo, b_hi) = (0.0, 0.0);
        }
        if b_hi - b_lo <= 0.0 {
            (b_lo, b_hi) = (b_lo - sigma, b_hi + sigma);
        }
        if l_hi <= 0.0 {
            l_hi = sigma;
        }
        Self::new(dim, resolution, sigma, weight, (b_lo, b_hi), (0.0, l_hi))
    }

    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Each pixel holds the bump density at its center times its area.
    pub fn image(&self, pd: &PersistenceDiagram) -> Vec<f64> {
        let r = self.resolution;
        let db = (self.birth_range.1 - self.birth_range.0) / r as f64;
        let dl = (self.lifespan_range.1 - self.lifespan_range.0) / r as f64;
        let norm = db * dl / (2.0 * PI * self.sigma * self.sigma);
        let two_s2 = 2.0 * self.sigma * self.sigma;
        let mut out = vec![0.0; r * r];
        for iv in finite(pd, self.dim) {
            let (b, l) = (iv.birth, iv.lifespan());
            let w = self.weight.eval(l) * norm;
            let gx: Vec<f64> = (0..r)
                .map(|i| {
                    let x = self.birth_range.0 + (i as f64 + 0.5) * db;
                    (-(x - b).powi(2) / two_s2).exp()
                })
                .collect();
            for j in 0..r {
                let y = self.lifespan_range.0 + (j as f64 + 0.5) * dl;
                let gy = w * (-(y - l).powi(2) / two_s2).exp();
                for (o, g) in out[j * r..(j + 1) * r].iter_mut().zip(&gx) {
                    *o += gy * g;
                }
            }
        }
        out
    }
}

/// Persistence landscape sampled at `resolution` evenly spaced points of
/// `range`, levels concatenated. With `max_intervals = Some(m)` only the `m`
/// longest intervals are used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeScheme {
    pub dim: u8,
    pub resolution: usize,
    pub levels: usize,
    pub max_intervals: Option<usize>,
    pub range: (f64, f64),
}

impl LandscapeScheme {
    pub fn new(
        dim: u8,
        resolution: usize,
        levels: usize,
        max_intervals: Option<usize>,
        range: (f64, f64),
    ) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::invalid("landscape resolution must be at least 2"));
        }
        if levels == 0 {
            return Err(Error::invalid("landscape needs at least one level"));
        }
        if !(range.0.is_finite() && range.1.is_finite() && range.1 >= range.0) {
            return Err(Error::invalid(format!("landscape range {range:?} is invalid")));
        }
        Ok(Self { dim, resolution, levels, max_intervals, range })
    }

    /// Range from the smallest birth to the largest death in `diagrams`.
    pub fn fit(
        diagrams: &[PersistenceDiagram],
        dim: u8,
        resolution: usize,
        levels: usize,
        max_intervals: Option<usize>,
    ) -> Result<Self> {
        Self::new(dim, resolution, levels, max_intervals, span(diagrams.iter(), dim))
    }

    pub fn len(&self) -> usize {
        self.resolution * self.levels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        let (lo, hi) = self.range;
        let step = (hi - lo) / (self.resolution - 1) as f64;
        (0..self.resolution).map(move |i| if i + 1 == self.resolution { hi } else { lo + i as f64 * step })
    }

    pub fn landscape(&self, pd: &PersistenceDiagram) -> Vec<f64> {
        let mut ivs: Vec<(f64, f64)> = finite(pd, self.dim).map(|iv| (iv.birth, iv.death)).collect();
        if let Some(m) = self.max_intervals {
            ivs.sort_by(|a, b| (b.1 - b.0).total_cmp(&(a.1 - a.0)));
            ivs.truncate(m);
        }
        let mut out = vec![0.0; self.len()];
        let mut tents = Vec::with_capacity(ivs.len());
        for (i, t) in self.samples().enumerate() {
            tents.clear();
            tents.extend(ivs.iter().map(|&(b, d)| (t - b).min(d - t)).filter(|&h| h > 0.0));
            tents.sort_by(|a, b| b.total_cmp(a));
            for (k, &h) in tents.iter().take(self.levels).enumerate() {
                out[k * self.resolution + i] = h;
            }
        }
        out
    }
}

fn span<'a>(diagrams: impl Iterator<Item = &'a PersistenceDiagram>, dim: u8) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for pd in diagrams {
        for iv in finite(pd, dim) {
            lo = lo.min(iv.birth);
            hi = hi.max(iv.death);
        }
    }
    if lo > hi {
        (0.0, 0.0)
    } else {
        (lo, hi)
    }
}

/// A fitted vectorization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignatureScheme {
    /// Largest `k` finite lifespans, descending, zero-padded.
    Lifespans {
        dim: u8,
        k: usize,
    },
    Image(ImageScheme),
    Landscape(LandscapeScheme),
    /// Cardinality, maximum, total and second-largest finite lifespan.
    Scalars {
        dim: u8,
    },
}

impl SignatureScheme {
    pub fn len(&self) -> usize {
        match self {
            SignatureScheme::Lifespans { k, .. } => *k,
            SignatureScheme::Image(s) => s.len(),
            SignatureScheme::Landscape(s) => s.len(),
            SignatureScheme::Scalars { .. } => 4,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self, pd: &PersistenceDiagram) -> Vec<f64> {
        match self {
            SignatureScheme::Lifespans { dim, k } => topk(pd, *dim, *k),
            SignatureScheme::Image(s) => s.image(pd),
            SignatureScheme::Landscape(s) => s.landscape(pd),
            SignatureScheme::Scalars { dim } => scalar_summaries(pd, *dim).to_vec(),
        }
    }

    pub fn transform(&self, pd: &PersistenceDiagram) -> SignatureVector {
        SignatureVector { values: self.values(pd), scheme: self.clone() }
    }
}

/// A signature together with the scheme that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignatureVector {
    pub values: Vec<f64>,
    pub scheme: SignatureScheme,
}

impl SignatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn topk(pd: &PersistenceDiagram, dim: u8, k: usize) -> Vec<f64> {
    let mut out = pd.finite_lifespans(dim);
    out.resize(k, 0.0);
    out
}

pub fn lifespans_topk(pd: &PersistenceDiagram, dim: u8, k: usize) -> SignatureVector {
    SignatureScheme::Lifespans { dim, k }.transform(pd)
}

/// Image whose range is fitted on `pd` alone.
pub fn persistence_image(
    pd: &PersistenceDiagram,
    dim: u8,
    resolution: usize,
    sigma: f64,
    weight: ImageWeight,
) -> Result<SignatureVector> {
    let scheme = ImageScheme::fit(std::slice::from_ref(pd), dim, resolution, sigma, weight)?;
    Ok(SignatureScheme::Image(scheme).transform(pd))
}

/// Landscape sampled over the span of `pd` itself.
pub fn persistence_landscape(
    pd: &PersistenceDiagram,
    dim: u8,
    resolution: usize,
    levels: usize,
) -> Result<SignatureVector> {
    let scheme = LandscapeScheme::fit(std::slice::from_ref(pd), dim, resolution, levels, None)?;
    Ok(SignatureScheme::Landscape(scheme).transform(pd))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalarSummaries {
    pub cardinality: f64,
    pub max_lifespan: f64,
    pub total_lifespan: f64,
    pub second_longest_lifespan: f64,
}

impl ScalarSummaries {
    pub fn to_vec(self) -> Vec<f64> {
        vec![self.cardinality, self.max_lifespan, self.total_lifespan, self.second_longest_lifespan]
    }
}

pub fn scalar_summaries(pd: &PersistenceDiagram, dim: u8) -> ScalarSummaries {
    let l = pd.finite_lifespans(dim);
    ScalarSummaries {
        cardinality: l.len() as f64,
        max_lifespan: l.first().copied().unwrap_or(0.0),
        total_lifespan: l.iter().sum(),
        second_longest_lifespan: l.get(1).copied().unwrap_or(0.0),
    }
}

/// An unfitted vectorization, one point of a model-selection grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignatureConfig {
    /// `k = None` keeps every lifespan, padded to the longest training
    /// diagram.
    Lifespans {
        k: Option<usize>,
    },
    Image {
        resolution: usize,
        sigma: f64,
        weight: ImageWeight,
    },
    /// Keeps the `max_intervals` longest intervals (all when `None`) and
    /// stacks `min(max_intervals, 10)` levels.
    Landscape {
        resolution: usize,
        max_intervals: Option<usize>,
    },
    Scalars,
}

pub const LANDSCAPE_MAX_LEVELS: usize = 10;

impl SignatureConfig {
    pub fn fit(&self, dim: u8, train: &[PersistenceDiagram]) -> Result<SignatureScheme> {
        Ok(match self {
            SignatureConfig::Lifespans { k: Some(k) } => SignatureScheme::Lifespans { dim, k: *k },
            SignatureConfig::Lifespans { k: None } => {
                let k = train.iter().map(|pd| finite(pd, dim).count()).max().unwrap_or(0).max(1);
                SignatureScheme::Lifespans { dim, k }
            }
            SignatureConfig::Image { resolution, sigma, weight } => {
                SignatureScheme::Image(ImageScheme::fit(train, dim, *resolution, *sigma, *weight)?)
            }
            SignatureConfig::Landscape { resolution, max_intervals } => {
                let levels = max_intervals.map_or(LANDSCAPE_MAX_LEVELS, |m| m.min(LANDSCAPE_MAX_LEVELS));
                SignatureScheme::Landscape(LandscapeScheme::fit(train, dim, *resolution, levels, *max_intervals)?)
            }
            SignatureConfig::Scalars => SignatureScheme::Scalars { dim },
        })
    }

    /// The model-selection grid: ten longest lifespans, 10x10 images over
    /// four bandwidths and three weights, and 100-sample landscapes over the
    /// longest 1, 10 or all intervals.
    pub fn standard_grid() -> Vec<SignatureConfig> {
        let mut grid = vec![SignatureConfig::Lifespans { k: Some(10) }];
        for sigma in [0.1, 0.5, 1.0, 10.0] {
            for weight in [ImageWeight::One, ImageWeight::Lifespan, ImageWeight::LifespanSquared] {
                grid.push(SignatureConfig::Image { resolution: 10, sigma, weight });
            }
        }
        for max_intervals in [Some(1), Some(10), None] {
            grid.push(SignatureConfig::Landscape { resolution: 100, max_intervals });
        }
        grid
    }
}

impl fmt::Display for SignatureConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignatureConfig::Lifespans { k: Some(k) } => write!(f, "lifespans(k={k})"),
            SignatureConfig::Lifespans { k: None } => write!(f, "lifespans(all)"),
            SignatureConfig::Image { resolution, sigma, weight } => {
                write!(f, "image(res={resolution},sigma={sigma},w={weight})")
            }
            SignatureConfig::Landscape { resolution, max_intervals: Some(m) } => {
                write!(f, "landscape(res={resolution},longest={m})")
            }
            SignatureConfig::Landscape { resolution, max_intervals: None } => {
                write!(f, "landscape(res={resolution},longest=all)")
            }
            SignatureConfig::Scalars => write!(f, "scalars"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pd(ivs: &[(u8, f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(ivs.iter().map(|&(d, b, e)| Interval::new(d, b, e)).collect()).unwrap()
    }

    #[test]
    fn topk_sorts_and_drops_infinite() {
        let p = pd(&[(0, 0.0, 3.0), (0, 1.0, 2.0), (0, 0.0, f64::INFINITY)]);
        assert_eq!(lifespans_topk(&p, 0, 2).values, vec![3.0, 1.0]);
        assert_eq!(lifespans_topk(&pd(&[]), 1, 10).values, vec![0.0; 10]);
    }

    #[test]
    fn scalar_examples() {
        let p = pd(&[(0, 0.0, f64::INFINITY)]);
        assert_eq!(scalar_summaries(&p, 0).to_vec(), vec![0.0; 4]);
        let p = pd(&[(0, 0.0, f64::INFINITY), (0, 0.0, 5.0), (0, 0.0, 2.0)]);
        assert_eq!(scalar_summaries(&p, 0).to_vec(), vec![2.0, 5.0, 7.0, 2.0]);
    }

    #[test]
    fn image_mass_of_one_interval() {
        let sigma = 0.25;
        let p = pd(&[(1, 1.0, 3.0)]);
        let scheme = ImageScheme::new(
            1,
            10,
            sigma,
            ImageWeight::Lifespan,
            (1.0 - 4.0 * sigma, 1.0 + 4.0 * sigma),
            (2.0 - 4.0 * sigma, 2.0 + 4.0 * sigma),
        )
        .unwrap();
        let mass: f64 = scheme.image(&p).iter().sum();
        // Gaussian mass inside +-4 sigma, squared for two axes.
        let inside = 1.0 - 6.334_248_366_623_996e-5;
        assert!((mass - 2.0 * inside * inside).abs() < 1e-3, "{mass}");
    }

    #[test]
    fn image_of_empty_and_doubled_diagrams() {
        let one = pd(&[(1, 0.2, 0.9)]);
        let two = pd(&[(1, 0.2, 0.9), (1, 0.2, 0.9)]);
        let scheme = ImageScheme::fit(std::slice::from_ref(&one), 1, 10, 0.1, ImageWeight::One).unwrap();
        assert!(scheme.image(&pd(&[])).iter().all(|&v| v == 0.0));
        let (a, b) = (scheme.image(&one), scheme.image(&two));
        assert!(a.iter().zip(&b).all(|(x, y)| *y == 2.0 * x));
        assert!(persistence_image(&one, 1, 10, 0.0, ImageWeight::One).is_err());
    }

    #[test]
    fn landscape_triangles() {
        let p = pd(&[(1, 0.0, 2.0)]);
        let s = LandscapeScheme::new(1, 3, 2, None, (0.0, 2.0)).unwrap();
        assert_eq!(s.landscape(&p), vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let nested = pd(&[(1, 0.0, 4.0), (1, 1.0, 3.0)]);
        let s = LandscapeScheme::new(1, 5, 2, None, (0.0, 4.0)).unwrap();
        assert_eq!(s.landscape(&nested), vec![0.0, 1.0, 2.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let v = persistence_landscape(&nested, 1, 100, 3).unwrap();
        assert_eq!(v.len(), 300);
    }

    #[test]
    fn landscape_truncates_to_longest_intervals() {
        let p = pd(&[(0, 0.0, 4.0), (0, 1.0, 3.0)]);
        let s = LandscapeScheme::new(0, 5, 1, Some(1), (0.0, 4.0)).unwrap();
        assert_eq!(s.landscape(&p), vec![0.0, 1.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn grid_has_sixteen_configs_and_fits() {
        let grid = SignatureConfig::standard_grid();
        assert_eq!(grid.len(), 16);
        let train = [pd(&[(1, 0.1, 0.5), (1, 0.2, 0.3)]), pd(&[(1, 0.0, 0.4)])];
        for cfg in &grid {
            let scheme = cfg.fit(1, &train).unwrap();
            let v = scheme.transform(&train[0]);
            assert_eq!(v.len(), scheme.len(), "{cfg}");
            assert!(v.values.iter().all(|x| x.is_finite()));
        }
        let all = SignatureConfig::Lifespans { k: None }.fit(1, &train).unwrap();
        assert_eq!(all, SignatureScheme::Lifespans { dim: 1, k: 2 });
    }

    #[test]
    fn scheme_json_round_trip() {
        let scheme = SignatureConfig::Image { resolution: 10, sigma: 0.5, weight: ImageWeight::LifespanSquared }
            .fit(1, &[pd(&[(1, 0.1, 0.5)])])
            .unwrap();
        let back: SignatureScheme = serde_json::from_str(&serde_json::to_string(&scheme).unwrap()).unwrap();
        assert_eq!(back, scheme);
    }

    fn arb_diagram() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.0f64..2.0, 0.0f64..2.0), 0..12)
    }

    fn build(raw: &[(f64, f64)]) -> PersistenceDiagram {
        pd(&raw.iter().map(|&(b, l)| (1, b, b + l)).collect::<Vec<_>>())
    }

    proptest! {
        #[test]
        fn image_is_additive(a in arb_diagram(), b in arb_diagram()) {
            let (pa, pb) = (build(&a), build(&b));
            let scheme = ImageScheme::new(1, 10, 0.3, ImageWeight::Lifespan, (0.0, 2.0), (0.0, 2.0)).unwrap();
            let (ia, ib, iu) = (scheme.image(&pa), scheme.image(&pb), scheme.image(&pa.union(&pb)));
            for k in 0..iu.len() {
                prop_assert!((iu[k] - ia[k] - ib[k]).abs() <= 1e-9);
            }
        }

        #[test]
        fn landscape_grows_with_intervals(a in arb_diagram(), b in arb_diagram()) {
            let (pa, pb) = (build(&a), build(&b));
            let s = LandscapeScheme::new(1, 20, 4, None, (0.0, 4.0)).unwrap();
            let (la, lu) = (s.landscape(&pa), s.landscape(&pa.union(&pb)));
            prop_assert!(la.iter().zip(&lu).all(|(x, y)| y >= x));
        }

        #[test]
        fn topk_is_lipschitz(a in arb_diagram(), noise in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12), eps in 0.0f64..0.1) {
            let p = build(&a);
            let moved: Vec<(f64, f64)> = a.iter().zip(&noise).map(|(&(b, l), &(u, v))| {
                let (nb, nd) = (b + eps * u, b + l + eps * v);
                (nb, (nd - nb).max(0.0))
            }).collect();
            let q = build(&moved);
            let (x, y) = (lifespans_topk(&p, 1, 10).values, lifespans_topk(&q, 1, 10).values);
            for k in 0..10 {
                prop_assert!((x[k] - y[k]).abs() <= 2.0 * eps + 1e-12);
            }
            prop_assert_eq!(scalar_summaries(&p, 1).cardinality as usize, a.len());
        }
    }
}
