//! Readers and writers for the on-disk formats: point-cloud CSV, PBM and
//! 0/1 CSV masks, diagram CSV, signature CSV with a JSON sidecar, and
//! dataset directories described by `manifest.json`.
//!
//! Numbers are written with the shortest representation that parses back to
//! the same `f64`, so every writer round-trips through its reader.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::datagen::{DatasetMeta, Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, PointCloud, PolarCloud};
use crate::persistence::{Interval, PersistenceDiagram};
use crate::pipelines::ExperimentReport;
use crate::signatures::{SignatureScheme, SignatureVector};

pub const MANIFEST: &str = "manifest.json";

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes `text`, creating missing parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, message: message.into() }
}

/// Non-blank lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

fn parse_row(path: &Path, line: usize, row: &str) -> Result<Vec<f64>> {
    row.split(',')
        .map(|f| {
            let f = f.trim();
            f.parse::<f64>().map_err(|_| parse_err(path, line, format!("'{f}' is not a number")))
        })
        .collect()
}

// ---- point clouds ----

pub fn point_cloud_to_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(f64::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// One point per row, `x,y` or `x,y,z`, no header.
pub fn parse_point_cloud_csv(text: &str, path: &Path) -> Result<PointCloud> {
    let mut dim = None;
    let mut coords = Vec::new();
    for (n, l) in lines(text) {
        let row = parse_row(path, n, l)?;
        if !(2..=3).contains(&row.len()) {
            return Err(parse_err(path, n, format!("expected 2 or 3 coordinates, found {}", row.len())));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(path, n, "coordinates must be finite"));
        }
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(parse_err(path, n, format!("expected {d} coordinates, found {}", row.len())))
            }
            _ => {}
        }
        coords.extend(row);
    }
    let dim = dim.ok_or_else(|| parse_err(path, 1, "no points"))?;
    PointCloud::new(dim, coords)
}

pub fn read_point_cloud(path: &Path) -> Result<PointCloud> {
    parse_point_cloud_csv(&read_text(path)?, path)
}

pub fn write_point_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    write_text(path, &point_cloud_to_csv(cloud))
}

/// Geodesic polar coordinates, `rho,phi` per row; the curvature lives in
/// the manifest label.
pub fn polar_cloud_to_csv(cloud: &PolarCloud) -> String {
    cloud.coords().iter().map(|(r, p)| format!("{r},{p}\n")).collect()
}

pub fn parse_polar_cloud_csv(text: &str, curvature: f64, path: &Path) -> Result<PolarCloud> {
    let mut coords = Vec::new();
    for (n, l) in lines(text) {
        match parse_row(path, n, l)?[..] {
            [r, p] => coords.push((r, p)),
            ref row => return Err(parse_err(path, n, format!("expected rho,phi, found {} fields", row.len()))),
        }
    }
    PolarCloud::new(coords, curvature).map_err(|e| parse_err(path, 1, e.to_string()))
}

// ---- masks ----

/// Plain PBM with the first raster row at the top. The physical extent is
/// kept in a comment so that it survives a round trip.
pub fn mask_to_pbm(mask: &BinaryMask) -> String {
    let side = mask.side();
    let [x, y] = mask.origin();
    let mut out = format!("P1\n# origin {x} {y} width {}\n{side} {side}\n", mask.width());
    for row in (0..side).rev() {
        let bits: Vec<&str> = (0..side).map(|c| if mask.get(c, row) { "1" } else { "0" }).collect();
        out.push_str(&bits.join(" "));
        out.push('\n');
    }
    out
}

fn extent_comment(comment: &str) -> Option<([f64; 2], f64)> {
    let f: Vec<&str> = comment.split_whitespace().collect();
    match f[..] {
        ["origin", x, y, "width", w] => Some(([x.parse().ok()?, y.parse().ok()?], w.parse().ok()?)),
        _ => None,
    }
}

pub fn parse_pbm(text: &str, path: &Path) -> Result<BinaryMask> {
    let mut extent = None;
    // (line, token) pairs with comments removed
    let mut tokens = Vec::new();
    for (n, l) in text.lines().enumerate() {
        let (body, comment) = l.split_once('#').map_or((l, None), |(b, c)| (b, Some(c)));
        if let Some(e) = comment.and_then(extent_comment) {
            extent = Some(e);
        }
        tokens.extend(body.split_whitespace().map(|t| (n + 1, t)));
    }
    let mut it = tokens.into_iter();
    match it.next() {
        Some((_, "P1")) => {}
        Some((n, t)) => return Err(parse_err(path, n, format!("expected P1 magic, found '{t}'"))),
        None => return Err(parse_err(path, 1, "empty file")),
    }
    let mut dimension = |what: &str| -> Result<usize> {
        let (n, t) = it.next().ok_or_else(|| parse_err(path, 1, format!("missing {what}")))?;
        t.parse().map_err(|_| parse_err(path, n, format!("bad {what} '{t}'")))
    };
    let (w, h) = (dimension("width")?, dimension("height")?);
    if w != h || w == 0 {
        return Err(parse_err(path, 1, format!("mask must be square and nonempty, got {w} x {h}")));
    }
    let mut top_down = Vec::with_capacity(w * w);
    let mut last = 1;
    // P1 allows pixels without separating whitespace.
    for (n, t) in it {
        last = n;
        for ch in t.chars() {
            match ch {
                '0' => top_down.push(false),
                '1' => top_down.push(true),
                _ => return Err(parse_err(path, n, format!("bad pixel '{ch}'"))),
            }
        }
    }
    if top_down.len() != w * w {
        return Err(parse_err(path, last, format!("expected {} pixels, found {}", w * w, top_down.len())));
    }
    let rows: Vec<Vec<bool>> = top_down.chunks(w).map(<[bool]>::to_vec).collect();
    let mask = BinaryMask::from_rows_top_down(&rows)?;
    match extent {
        Some((origin, width)) => mask.with_extent(origin, width).map_err(|e| parse_err(path, 2, e.to_string())),
        None => Ok(mask),
    }
}

/// Square grid of 0/1 values, rows listed top to bottom.
pub fn parse_mask_csv(text: &str, path: &Path) -> Result<BinaryMask> {
    let mut rows = Vec::new();
    for (n, l) in lines(text) {
        let row = l
            .split(',')
            .map(|f| match f.trim() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(parse_err(path, n, format!("expected 0 or 1, found '{other}'"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        rows.push((n, row));
    }
    let side = rows.len();
    if let Some((n, r)) = rows.iter().find(|(_, r)| r.len() != side) {
        return Err(parse_err(path, *n, format!("row has {} cells, expected {side}", r.len())));
    }
    if side == 0 {
        return Err(parse_err(path, 1, "empty mask"));
    }
    BinaryMask::from_rows_top_down(&rows.into_iter().map(|(_, r)| r).collect::<Vec<_>>())
}

/// PBM when the file starts with `P1`, otherwise a 0/1 CSV grid.
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let text = read_text(path)?;
    if text.trim_start().starts_with("P1") {
        parse_pbm(&text, path)
    } else {
        parse_mask_csv(&text, path)
    }
}

pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    write_text(path, &mask_to_pbm(mask))
}

// ---- diagrams ----

/// `dim,birth,death` rows under a header, sorted by dimension, birth and
/// death; classes that never die have death `inf`.
pub fn diagram_to_csv(pd: &PersistenceDiagram) -> String {
    let mut out = String::from("dim,birth,death\n");
    for iv in pd.intervals() {
        let _ = writeln!(out, "{},{},{}", iv.dim, iv.birth, iv.death);
    }
    out
}

pub fn parse_diagram_csv(text: &str, path: &Path) -> Result<PersistenceDiagram> {
    let mut intervals = Vec::new();
    for (n, l) in lines(text) {
        if l.starts_with("dim") {
            continue;
        }
        let f: Vec<&str> = l.split(',').map(str::trim).collect();
        let [d, b, e] = f[..] else {
            return Err(parse_err(path, n, format!("expected dim,birth,death, found {} fields", f.len())));
        };
        let dim = d.parse().map_err(|_| parse_err(path, n, format!("bad dimension '{d}'")))?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| parse_err(path, n, format!("'{s}' is not a number")));
        let (birth, death) = (num(b)?, num(e)?);
        if !birth.is_finite() || death.is_nan() || death < birth {
            return Err(parse_err(path, n, format!("invalid interval [{b}, {e})")));
        }
        intervals.push(Interval::new(dim, birth, death));
    }
    PersistenceDiagram::new(intervals)
}

pub fn read_diagram(path: &Path) -> Result<PersistenceDiagram> {
    parse_diagram_csv(&read_text(path)?, path)
}

pub fn write_diagram(path: &Path, pd: &PersistenceDiagram) -> Result<()> {
    write_text(path, &diagram_to_csv(pd))
}

/// Birth/death scatter with the diagonal; classes that never die are drawn
/// on a dashed line above the finite points.
pub fn diagram_to_svg(pd: &PersistenceDiagram) -> String {
    const SIZE: f64 = 400.0;
    const PAD: f64 = 40.0;
    const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];
    let finite_max =
        pd.intervals().iter().flat_map(|iv| [iv.birth, iv.death]).filter(|v| v.is_finite()).fold(0.0f64, f64::max);
    let top = if finite_max > 0.0 { finite_max * 1.1 } else { 1.0 };
    let span = SIZE - 2.0 * PAD;
    let x = |v: f64| PAD + v / top * span;
    let y = |v: f64| SIZE - PAD - v.min(top) / top * span;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    );
    let _ = writeln!(out, "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\"/>",
        x(0.0),
        y(0.0),
        x(top),
        y(top)
    );
    if pd.intervals().iter().any(|iv| !iv.is_finite()) {
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>",
            x(0.0),
            y(top),
            x(top),
            y(top)
        );
    }
    for iv in pd.intervals() {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\"><title>dim {} [{}, {})</title></circle>",
            x(iv.birth),
            y(iv.death),
            COLORS[usize::from(iv.dim).min(2)],
            iv.dim,
            iv.birth,
            iv.death
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">birth</text>",
        SIZE / 2.0,
        SIZE - 10.0
    );
    let _ = writeln!(
        out,
        "<text x=\"12\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 12 {})\">death</text>",
        SIZE / 2.0,
        SIZE / 2.0
    );
    out.push_str("</svg>\n");
    out
}

// ---- signatures ----

/// Signature rows go to `path`; the scheme that produced them goes to the
/// sidecar `path` with extension `json`.
pub fn write_signatures(path: &Path, scheme: &SignatureScheme, rows: &[SignatureVector]) -> Result<()> {
    let mut out = String::new();
    for r in rows {
        if r.scheme != *scheme {
            return Err(Error::invalid("every signature row must come from the written scheme"));
        }
        let fields: Vec<String> = r.values.iter().map(f64::to_string).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    write_text(path, &out)?;
    write_json(&path.with_extension("json"), scheme)
}

pub fn read_signatures(path: &Path) -> Result<Vec<SignatureVector>> {
    let scheme: SignatureScheme = read_json(&path.with_extension("json"))?;
    let text = read_text(path)?;
    lines(&text)
        .map(|(n, l)| {
            let values = parse_row(path, n, l)?;
            if values.len() != scheme.len() {
                return Err(parse_err(path, n, format!("expected {} values, found {}", scheme.len(), values.len())));
            }
            Ok(SignatureVector { values, scheme: scheme.clone() })
        })
        .collect()
}

// ---- reports ----

pub fn write_report(path: &Path, report: &ExperimentReport) -> Result<()> {
    write_json(path, report)
}

pub fn read_report(path: &Path) -> Result<ExperimentReport> {
    read_json(path)
}

/// Regime table as `name,metric,value`.
pub fn report_regimes_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("name,metric,value\n");
    for r in &report.regimes {
        let _ = writeln!(out, "{},{},{}", r.name, r.metric, r.value);
    }
    out
}

// ---- datasets ----

/// An item type that can be stored as one file of a dataset directory.
pub trait ItemFile: Sized {
    const EXTENSION: &'static str;
    fn to_text(&self) -> String;
    fn from_text(text: &str, label: Label, path: &Path) -> Result<Self>;
}

impl ItemFile for PointCloud {
    const EXTENSION: &'static str = "csv";
    fn to_text(&self) -> String {
        point_cloud_to_csv(self)
    }
    fn from_text(text: &str, _: Label, path: &Path) -> Result<Self> {
        parse_point_cloud_csv(text, path)
    }
}

impl ItemFile for PolarCloud {
    const EXTENSION: &'static str = "csv";
    fn to_text(&self) -> String {
        polar_cloud_to_csv(self)
    }
    fn from_text(text: &str, label: Label, path: &Path) -> Result<Self> {
        parse_polar_cloud_csv(text, label.as_f64(), path)
    }
}

impl ItemFile for BinaryMask {
    const EXTENSION: &'static str = "pbm";
    fn to_text(&self) -> String {
        mask_to_pbm(self)
    }
    fn from_text(text: &str, _: Label, path: &Path) -> Result<Self> {
        if text.trim_start().starts_with("P1") {
            parse_pbm(text, path)
        } else {
            parse_mask_csv(text, path)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestItem {
    pub file: String,
    pub label: Label,
    pub shape_id: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub generator: String,
    pub seed: u64,
    pub params: serde_json::Value,
    pub items: Vec<ManifestItem>,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self> {
        read_json(&dir.join(MANIFEST))
    }
}

/// Writes `manifest.json` and one file per item into `dir`.
pub fn write_dataset<T: ItemFile>(dir: &Path, ds: &LabeledDataset<T>) -> Result<Manifest> {
    let width = ds.len().saturating_sub(1).to_string().len().max(4);
    let mut items = Vec::with_capacity(ds.len());
    for (i, item) in ds.items.iter().enumerate() {
        let file = format!("item_{i:0width$}.{}", T::EXTENSION);
        write_text(&dir.join(&file), &item.to_text())?;
        items.push(ManifestItem {
            file,
            label: ds.labels[i],
            shape_id: ds.meta.shape_ids[i].clone(),
            seed: ds.meta.item_seeds[i],
        });
    }
    let manifest =
        Manifest { generator: ds.meta.generator.clone(), seed: ds.meta.seed, params: ds.meta.params.clone(), items };
    write_json(&dir.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

/// Reads a dataset directory; with `generator` set, the manifest must name
/// that generator.
pub fn read_dataset<T: ItemFile>(dir: &Path, generator: Option<&str>) -> Result<LabeledDataset<T>> {
    let manifest = Manifest::read(dir)?;
    if let Some(g) = generator.filter(|g| *g != manifest.generator) {
        return Err(Error::invalid(format!(
            "{} holds a '{}' dataset, expected '{g}'",
            dir.display(),
            manifest.generator
        )));
    }
    let mut items = Vec::with_capacity(manifest.items.len());
    for m in &manifest.items {
        let path: PathBuf = dir.join(&m.file);
        items.push(T::from_text(&read_text(&path)?, m.label, &path)?);
    }
    Ok(LabeledDataset {
        items,
        labels: manifest.items.iter().map(|m| m.label).collect(),
        meta: DatasetMeta {
            generator: manifest.generator,
            seed: manifest.seed,
            item_seeds: manifest.items.iter().map(|m| m.seed).collect(),
            shape_ids: manifest.items.iter().map(|m| m.shape_id.clone()).collect(),
            params: manifest.params,
        },
    })
}
