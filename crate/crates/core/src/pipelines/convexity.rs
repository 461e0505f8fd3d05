use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use super::{par_map, train_test_split, ExperimentReport};
use crate::complex::{cubical_complex, CubicalFunction};
use crate::datagen::LabeledDataset;
use crate::error::{Error, Result};
use crate::geometry::{convexity_measure, rasterize, BinaryMask, Line, PointCloud, RasterSource};
use crate::learn::{accuracy, mse, ridge_fit_standardized, spearman, threshold_fit, FeatureMatrix, Metric, Model};
use crate::persistence::compute_ph0_unionfind;

/// Decision threshold, in cell widths, used when the training set holds a
/// single class.
pub const FALLBACK_THRESHOLD_CELLS: f64 = 1.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSet {
    pub lines: Vec<Line>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineChoice {
    /// The nine lines of [`default_lines`].
    #[default]
    Default,
    /// The nine lines plus four through the box center.
    Extended,
}

impl LineChoice {
    pub fn lines(self, mask: &BinaryMask) -> Result<LineSet> {
        match self {
            LineChoice::Default => default_lines(mask),
            LineChoice::Extended => extended_lines(mask),
        }
    }
}

/// Nine lines relative to the bounding box `[x0, x1] x [y0, y1]` of the
/// occupied cell centers: the four box edges, a 45 degree line through each
/// corner running across the diagonal to it, and a 45 degree line through
/// the middle of the bottom edge. Only grid-aligned directions are used:
/// along them neighboring cells tie exactly, so a digitized convex shape
/// gives no spurious components.
pub fn default_lines(mask: &BinaryMask) -> Result<LineSet> {
    let ([x0, y0], [x1, y1]) = mask.occupied_bounds().ok_or_else(|| Error::invalid("mask has no occupied cell"))?;
    let xc = (x0 + x1) / 2.0;
    let up = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
    let down = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2];
    let lines = vec![
        Line::new([x0, y0], [1.0, 0.0])?,
        Line::new([x0, y1], [1.0, 0.0])?,
        Line::new([x0, y0], [0.0, 1.0])?,
        Line::new([x1, y0], [0.0, 1.0])?,
        Line::new([x0, y0], down)?,
        Line::new([x1, y0], up)?,
        Line::new([x1, y1], down)?,
        Line::new([x0, y1], up)?,
        Line::new([xc, y0], up)?,
    ];
    Ok(LineSet { lines })
}

/// [`default_lines`] plus the horizontal, vertical and both 45 degree lines
/// through the box center.
pub fn extended_lines(mask: &BinaryMask) -> Result<LineSet> {
    let mut set = default_lines(mask)?;
    let ([x0, y0], [x1, y1]) = mask.occupied_bounds().expect("checked by default_lines");
    let c = [(x0 + x1) / 2.0, (y0 + y1) / 2.0];
    for d in [[1.0, 0.0], [0.0, 1.0], [FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2]] {
        set.lines.push(Line::new(c, d)?);
    }
    Ok(set)
}

/// Lifespans below this many cell widths are floating-point residue of exact
/// ties and count as zero.
pub const LIFESPAN_FLOOR_CELLS: f64 = 1e-9;

/// Per line, the lifespan of the second most persistent degree-0 class of
/// the tubular filtration, in cell widths. Classes that never die count
/// until the largest filtration value, so a connected mask contributes its
/// longest finite lifespan. With `normalize` every entry is further divided
/// by the number of occupied cells.
pub fn concavity_features(mask: &BinaryMask, lines: &LineSet, normalize: bool) -> Result<Vec<f64>> {
    let area = mask.occupied_count();
    if area == 0 {
        return Err(Error::invalid("mask has no occupied cell"));
    }
    let w = mask.cell_width();
    lines
        .lines
        .iter()
        .map(|line| {
            let grid = cubical_complex(mask, CubicalFunction::Tubular(*line))?;
            let top = grid.top_values().iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
            let mut l: Vec<f64> =
                compute_ph0_unionfind(&grid).intervals().iter().map(|iv| iv.death.min(top) - iv.birth).collect();
            l.sort_by(|a, b| b.total_cmp(a));
            let mut second = l.get(1).copied().unwrap_or(0.0) / w;
            if second < LIFESPAN_FLOOR_CELLS {
                second = 0.0;
            }
            Ok(if normalize { second / area as f64 } else { second })
        })
        .collect()
}

/// Largest unnormalized concavity feature: zero for shapes whose every
/// tubular filtration stays connected.
pub fn convexity_scalar(mask: &BinaryMask, lines: LineChoice) -> Result<f64> {
    Ok(concavity_features(mask, &lines.lines(mask)?, false)?.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityConfig {
    /// Raster side.
    pub side: usize,
    pub lines: LineChoice,
    pub train_fraction: f64,
    pub jobs: usize,
}

impl Default for ConvexityConfig {
    fn default() -> Self {
        Self { side: 20, lines: LineChoice::Default, train_fraction: 400.0 / 480.0, jobs: 0 }
    }
}

fn fit_threshold(scalars: &[f64], labels: &[f64]) -> Model {
    threshold_fit(scalars, labels).unwrap_or(Model::Threshold {
        threshold: FALLBACK_THRESHOLD_CELLS,
        above: 0.0,
        below: 1.0,
    })
}

/// Convex (label 1) against concave (label 0) by a learned threshold on
/// [`convexity_scalar`], in four regimes: trained and tested on regular
/// shapes, on random shapes, and across the two.
pub fn convexity_pipeline(
    regular: &LabeledDataset<PointCloud>,
    random: &LabeledDataset<PointCloud>,
    config: &ConvexityConfig,
    seed: u64,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let scalars = |ds: &LabeledDataset<PointCloud>| {
        par_map(config.jobs, &ds.items, |_, c| {
            convexity_scalar(&rasterize(RasterSource::Cloud(c), config.side)?, config.lines)
        })
    };
    let sets = [("regular", regular, scalars(regular)?), ("random", random, scalars(random)?)];
    let mut splits = Vec::new();
    for (_, ds, s) in &sets {
        let labels = ds.label_values();
        let (train, test) = train_test_split(&labels, config.train_fraction, seed, true)?;
        let pick = |idx: &[usize], v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        splits.push(((pick(&train, s), pick(&train, &labels)), (pick(&test, s), pick(&test, &labels))));
    }
    let mut report = ExperimentReport {
        experiment: "convexity".into(),
        config: json!({
            "pipeline": config,
            "regular": regular.meta.params,
            "random": random.meta.params,
        }),
        seed,
        regimes: Vec::new(),
        items: Vec::new(),
        warnings: Vec::new(),
        wall_time: Default::default(),
    };
    let mut models = Vec::new();
    for (a, b) in [(0, 0), (1, 1), (0, 1), (1, 0)] {
        let name = if a == b { format!("{0}/{0}", sets[a].0) } else { format!("{}->{}", sets[a].0, sets[b].0) };
        let ((train_s, train_l), _) = &splits[a];
        let (_, (test_s, test_l)) = &splits[b];
        let model = fit_threshold(train_s, train_l);
        let preds = model.predict_scalars(test_s);
        report.push_regime(&name, Metric::Accuracy, accuracy(&preds, test_l)?);
        report.push_items(&name, test_l, &preds);
        models.push(json!({ "regime": name, "model": model }));
    }
    report.config["models"] = json!(models);
    report.wall_time = start.elapsed();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionConfig {
    pub lines: LineChoice,
    pub train_fraction: f64,
    /// Ridge penalty on standardized features.
    pub lambda: f64,
    pub jobs: usize,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        Self { lines: LineChoice::Default, train_fraction: 0.7, lambda: 1.0, jobs: 0 }
    }
}

/// Ridge regression of the convexity measure on area-normalized concavity
/// features. Regimes: test `mse`, and `spearman` between `1 - c` and the
/// feature sum over all usable masks.
pub fn convexity_regression(
    masks: &LabeledDataset<BinaryMask>,
    config: &RegressionConfig,
    seed: u64,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    if masks.len() < 20 {
        return Err(Error::invalid(format!("convexity regression needs at least 20 masks, got {}", masks.len())));
    }
    let rows = par_map(config.jobs, &masks.items, |_, m| -> Result<Option<(f64, Vec<f64>)>> {
        match convexity_measure(m) {
            Ok(c) => Ok(Some((c, concavity_features(m, &config.lines.lines(m)?, true)?))),
            Err(Error::Degenerate(_)) => Ok(None),
            Err(e) => Err(e),
        }
    })?;
    let mut warnings = Vec::new();
    let mut labels = Vec::new();
    let mut features = Vec::new();
    for (i, r) in rows.into_iter().enumerate() {
        match r {
            Some((c, f)) => {
                labels.push(c);
                features.push(f);
            }
            None => warnings.push(format!("mask {i} skipped: occupied cells are collinear")),
        }
    }
    let x = FeatureMatrix::from_rows(&features)?;
    let (train, test) = train_test_split(&labels, config.train_fraction, seed, false)?;
    let pick = |idx: &[usize]| idx.iter().map(|&i| labels[i]).collect::<Vec<f64>>();
    let model = ridge_fit_standardized(&x.select(&train), &pick(&train), config.lambda)?;
    // The measure lives in [0, 1]; clamping keeps a test mask with features
    // outside the training range from extrapolating past it.
    let preds: Vec<f64> = model.predict(&x.select(&test))?.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
    let test_labels = pick(&test);
    let concavity: Vec<f64> = labels.iter().map(|c| 1.0 - c).collect();
    let sums: Vec<f64> = features.iter().map(|f| f.iter().sum()).collect();

    let mut report = ExperimentReport {
        experiment: "convexity_measure".into(),
        config: json!({
            "pipeline": config,
            "masks": masks.meta.params,
            "usable_masks": labels.len(),
            "model": model,
        }),
        seed,
        regimes: Vec::new(),
        items: Vec::new(),
        warnings,
        wall_time: Default::default(),
    };
    report.push_regime("mse", Metric::Mse, mse(&preds, &test_labels)?);
    report.regimes.push(super::RegimeResult {
        name: "spearman".into(),
        metric: "spearman".into(),
        value: spearman(&concavity, &sums)?,
    });
    report.push_items("test", &test_labels, &preds);
    report.wall_time = start.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{gen_random_convex_polygon, Shape};

    fn rows(pattern: &[&str]) -> BinaryMask {
        BinaryMask::from_rows_top_down(
            &pattern.iter().map(|r| r.chars().map(|c| c == '#').collect()).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn nine_distinct_lines_that_follow_the_box() {
        let mask = rows(&["##", "##"]);
        let lines = default_lines(&mask).unwrap().lines;
        assert_eq!(lines.len(), 9);
        for i in 0..9 {
            for j in i + 1..9 {
                assert_ne!(lines[i], lines[j]);
            }
        }
        let moved = mask.with_extent([mask.origin()[0] + 3.0, mask.origin()[1] - 1.0], mask.width()).unwrap();
        for (a, b) in lines.iter().zip(default_lines(&moved).unwrap().lines) {
            assert_eq!(a.translated([3.0, -1.0]), b);
        }
        assert!(default_lines(&rows(&["..", ".."])).is_err());
    }

    #[test]
    fn full_square_gives_one_interval_per_line() {
        let mask = BinaryMask::from_cells(6, vec![true; 36]).unwrap();
        for line in default_lines(&mask).unwrap().lines {
            let pd = compute_ph0_unionfind(&cubical_complex(&mask, CubicalFunction::Tubular(line)).unwrap());
            assert_eq!(pd.len(), 1);
        }
        assert_eq!(concavity_features(&mask, &default_lines(&mask).unwrap(), false).unwrap(), vec![0.0; 9]);
    }

    #[test]
    fn u_shape_is_concave() {
        let mask = rows(&["#...#", "#...#", "#...#", "#...#", "#####"]);
        let f = concavity_features(&mask, &default_lines(&mask).unwrap(), false).unwrap();
        assert!(f.iter().any(|&v| v > 0.0), "{f:?}");
        // The top horizontal meets both arms at distance zero; they join
        // four cells later through the base.
        assert!((f[1] - 4.0).abs() < 1e-12, "{f:?}");
    }

    #[test]
    fn convex_polygons_have_zero_features() {
        for s in 0..20 {
            let p = gen_random_convex_polygon(s);
            let mask = rasterize(RasterSource::Polygon(&p), 20).unwrap();
            for lines in [LineChoice::Default, LineChoice::Extended] {
                assert_eq!(convexity_scalar(&mask, lines).unwrap(), 0.0, "seed {s}");
            }
        }
    }

    #[test]
    fn normalized_features_ignore_extent() {
        let Shape::Polygon(star) = Shape::star(5, 0.5, 0.2).unwrap() else { unreachable!() };
        let mask = rasterize(RasterSource::Polygon(&star), 30).unwrap();
        let base = concavity_features(&mask, &default_lines(&mask).unwrap(), true).unwrap();
        assert!(base.iter().any(|&v| v > 0.0));
        let moved = mask.with_extent([10.0, -4.0], 7.5 * mask.width()).unwrap();
        let f = concavity_features(&moved, &default_lines(&moved).unwrap(), true).unwrap();
        for (a, b) in base.iter().zip(&f) {
            assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn threshold_falls_back_for_one_class() {
        let m = fit_threshold(&[0.0, 0.0], &[1.0, 1.0]);
        assert_eq!(m.predict_scalars(&[0.5, 2.0]), vec![1.0, 0.0]);
    }
}
