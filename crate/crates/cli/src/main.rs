use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};

use tda_lab::complex::{cubical_complex, rips_complex, weighted_rips_complex, CubicalFunction, RipsOptions};
use tda_lab::datagen::{
    gen_convexity_dataset, gen_curvature_dataset, gen_holes_dataset, gen_mask_corpus, ConvexityKind, CurvatureConfig,
    MaskCorpusConfig,
};
use tda_lab::geometry::{dtm, euclidean_distance_matrix, farthest_point_subsample, rasterize, RasterSource};
use tda_lab::io;
use tda_lab::persistence::compute_ph;
use tda_lab::pipelines::{
    convexity_pipeline, convexity_regression, curvature_pipeline, default_lines, holes_pipeline, ConvexityConfig,
    CurvaturePipelineConfig, ExperimentReport, HolesConfig, LineChoice, RegressionConfig, SignatureChoice,
};
use tda_lab::{BinaryMask, Line, PointCloud, PolarCloud};

/// Persistent homology experiments on synthetic shapes.
#[derive(Parser, Debug, Serialize)]
#[command(name = "tda-lab", version)]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, env = "TDA_LAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Use the sizes of the original experiments instead of the desk-scale
    /// defaults.
    #[arg(long, global = true)]
    paper_scale: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
enum Command {
    /// Write a labeled dataset directory.
    Generate(GenerateArgs),
    /// Compute the persistence diagram of one cloud or mask.
    Ph(PhArgs),
    /// Run an experiment on a generated dataset and write its report.
    Run(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DatasetKind {
    Holes,
    Curvature,
    Convexity,
    Masks,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum KindArg {
    Regular,
    Random,
    Both,
}

#[derive(Args, Debug, Serialize)]
struct GenerateArgs {
    dataset: DatasetKind,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Holes: clouds per shape.
    #[arg(long)]
    clouds_per_shape: Option<usize>,
    /// Curvature: clouds per training curvature.
    #[arg(long)]
    clouds_per_kappa: Option<usize>,
    /// Curvature: number of test clouds.
    #[arg(long)]
    test_count: Option<usize>,
    /// Points per cloud.
    #[arg(long)]
    points: Option<usize>,
    /// Convexity: which family; `both` writes `regular/` and `random/`.
    #[arg(long, value_enum, default_value_t = KindArg::Both)]
    kind: KindArg,
    /// Convexity: clouds per class.
    #[arg(long, default_value_t = 240)]
    per_class: usize,
    /// Masks: number of masks.
    #[arg(long, default_value_t = 200)]
    count: usize,
    /// Masks: raster side.
    #[arg(long, default_value_t = 30)]
    grid_side: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FiltrationArg {
    /// Rips on Euclidean distances.
    Rips,
    /// Rips weighted by the distance to measure.
    Dtm,
    /// Distance to a line, on a mask.
    Tubular,
    /// Height along a direction, on a mask.
    Height,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
struct PhArgs {
    /// Point-cloud CSV, or a mask as PBM (or 0/1 CSV with `--mask`).
    input: PathBuf,
    /// Diagram output file.
    #[arg(long)]
    out: PathBuf,
    /// Also draw the diagram as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Treat a CSV input as a 0/1 mask grid.
    #[arg(long)]
    mask: bool,
    /// Defaults to `rips` for clouds and `tubular` for masks.
    #[arg(long, value_enum)]
    filtration: Option<FiltrationArg>,
    /// Tubular line: bottom, top, left, right, center-h, center-v, diagonal,
    /// antidiagonal, or an index into the nine default lines.
    #[arg(long, default_value = "bottom")]
    line: String,
    /// Height direction in degrees.
    #[arg(long, default_value_t = 90.0)]
    angle: f64,
    /// Raster side used when a cloud is given with a mask filtration.
    #[arg(long, default_value_t = 20)]
    grid_side: usize,
    /// Farthest-point subsample size for clouds.
    #[arg(long)]
    subsample: Option<usize>,
    /// Distance-to-measure mass.
    #[arg(long, default_value_t = 0.03)]
    dtm_m: f64,
    /// Highest homology degree.
    #[arg(long, default_value_t = 1)]
    max_dim: usize,
    /// Build the complex even beyond the size guard.
    #[arg(long)]
    force: bool,
    /// Write the filtered complex as `dim,value,vertices` rows.
    #[arg(long)]
    dump_complex: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Experiment {
    Holes,
    Curvature,
    Convexity,
    ConvexityMeasure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LinesArg {
    Default,
    Extended,
}

#[derive(Args, Debug, Serialize)]
struct RunArgs {
    experiment: Experiment,
    /// Dataset directory written by `generate`.
    data: PathBuf,
    /// Report output file.
    #[arg(long)]
    out: PathBuf,
    /// Holes: farthest-point subsample size.
    #[arg(long)]
    subsample: Option<usize>,
    /// Holes and curvature: signature choice.
    #[arg(long, value_parser = parse_signature)]
    signature: Option<String>,
    /// Convexity: raster side.
    #[arg(long)]
    grid_side: Option<usize>,
    /// Convexity: tubular line set.
    #[arg(long, value_enum, default_value_t = LinesArg::Default)]
    lines: LinesArg,
    /// `json` writes the full report, `csv` the regime table.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_signature(s: &str) -> std::result::Result<String, String> {
    s.parse::<SignatureChoice>().map(|c| c.to_string()).map_err(|e| e.to_string())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => generate(cli, a),
        Command::Ph(a) => ph(a),
        Command::Run(a) => run_experiment(cli, a),
    }
}

fn generate(cli: &Cli, a: &GenerateArgs) -> Result<()> {
    let full = cli.paper_scale;
    match a.dataset {
        DatasetKind::Holes => {
            let clouds = a.clouds_per_shape.unwrap_or(if full { 50 } else { 10 });
            let points = a.points.unwrap_or(if full { 1000 } else { 300 });
            let ds = gen_holes_dataset(clouds, points, cli.seed)?;
            let m = io::write_dataset(&a.out, &ds)?;
            eprintln!("wrote {} clouds to {}", m.items.len(), a.out.display());
        }
        DatasetKind::Curvature => {
            let cfg = CurvatureConfig {
                clouds_per_kappa: a.clouds_per_kappa.unwrap_or(if full { 10 } else { 3 }),
                points: a.points.unwrap_or(if full { 500 } else { 200 }),
                test_count: a.test_count.unwrap_or(if full { 100 } else { 30 }),
            };
            let (train, test) = gen_curvature_dataset(&cfg, cli.seed)?;
            io::write_dataset(&a.out.join("train"), &train)?;
            io::write_dataset(&a.out.join("test"), &test)?;
            eprintln!("wrote {} training and {} test clouds to {}", train.len(), test.len(), a.out.display());
        }
        DatasetKind::Convexity => {
            let points = a.points.unwrap_or(if full { 5000 } else { 1000 });
            let kinds: &[(ConvexityKind, Option<&str>)] = match a.kind {
                KindArg::Regular => &[(ConvexityKind::Regular, None)],
                KindArg::Random => &[(ConvexityKind::Random, None)],
                KindArg::Both => &[(ConvexityKind::Regular, Some("regular")), (ConvexityKind::Random, Some("random"))],
            };
            for &(kind, sub) in kinds {
                let ds = gen_convexity_dataset(kind, a.per_class, points, cli.seed)?;
                let dir = sub.map_or_else(|| a.out.clone(), |s| a.out.join(s));
                let m = io::write_dataset(&dir, &ds)?;
                eprintln!("wrote {} {kind} clouds to {}", m.items.len(), dir.display());
            }
        }
        DatasetKind::Masks => {
            let cfg = MaskCorpusConfig { count: a.count, side: a.grid_side, ..Default::default() };
            let ds = gen_mask_corpus(&cfg, cli.seed)?;
            let m = io::write_dataset(&a.out, &ds)?;
            eprintln!("wrote {} masks to {}", m.items.len(), a.out.display());
        }
    }
    Ok(())
}

fn is_pbm(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pbm"))
}

fn named_line(mask: &BinaryMask, name: &str) -> Result<Line> {
    let ([x0, y0], [x1, y1]) = mask.occupied_bounds().context("mask has no occupied cell")?;
    let (xc, yc) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let d = FRAC_1_SQRT_2;
    let line = match name {
        "bottom" => Line::new([x0, y0], [1.0, 0.0])?,
        "top" => Line::new([x0, y1], [1.0, 0.0])?,
        "left" => Line::new([x0, y0], [0.0, 1.0])?,
        "right" => Line::new([x1, y0], [0.0, 1.0])?,
        "center-h" => Line::new([xc, yc], [1.0, 0.0])?,
        "center-v" => Line::new([xc, yc], [0.0, 1.0])?,
        "diagonal" => Line::new([xc, yc], [d, d])?,
        "antidiagonal" => Line::new([xc, yc], [d, -d])?,
        other => {
            let i: usize = other.parse().with_context(|| format!("unknown line '{other}'"))?;
            let lines = default_lines(mask)?.lines;
            *lines.get(i).with_context(|| format!("line index {i} out of range 0..{}", lines.len()))?
        }
    };
    Ok(line)
}

fn ph(a: &PhArgs) -> Result<()> {
    let mask_input = a.mask || is_pbm(&a.input);
    let filtration = a.filtration.unwrap_or(if mask_input { FiltrationArg::Tubular } else { FiltrationArg::Rips });
    let pd = match filtration {
        FiltrationArg::Rips | FiltrationArg::Dtm => {
            if mask_input {
                bail!("{filtration:?} filtrations need a point cloud, not a mask");
            }
            let mut cloud = io::read_point_cloud(&a.input)?;
            if let Some(k) = a.subsample.filter(|&k| k < cloud.len()) {
                cloud = farthest_point_subsample(&cloud, k, 0)?;
            }
            let matrix = euclidean_distance_matrix(&cloud);
            let opts = RipsOptions { max_dim: (a.max_dim + 1).min(2), force: a.force, ..Default::default() };
            let cx = if filtration == FiltrationArg::Dtm {
                weighted_rips_complex(&matrix, &dtm(&matrix, a.dtm_m)?, opts)?
            } else {
                rips_complex(&matrix, opts)?
            };
            if let Some(p) = &a.dump_complex {
                io::write_text(p, &cx.to_csv())?;
            }
            compute_ph(&cx, a.max_dim)
        }
        FiltrationArg::Tubular | FiltrationArg::Height => {
            let mask = if mask_input {
                io::read_mask(&a.input)?
            } else {
                let cloud: PointCloud = io::read_point_cloud(&a.input)?;
                rasterize(RasterSource::Cloud(&cloud), a.grid_side)?
            };
            let f = if filtration == FiltrationArg::Tubular {
                CubicalFunction::Tubular(named_line(&mask, &a.line)?)
            } else {
                let t = a.angle.to_radians();
                CubicalFunction::Height([t.cos(), t.sin()])
            };
            if a.dump_complex.is_some() {
                eprintln!("warning: --dump-complex applies to Rips filtrations only");
            }
            compute_ph(&cubical_complex(&mask, f)?, a.max_dim.min(1))
        }
    };
    match a.format {
        Format::Csv => io::write_diagram(&a.out, &pd)?,
        Format::Json => io::write_json(&a.out, &pd)?,
    }
    if let Some(svg) = &a.svg {
        io::write_text(svg, &io::diagram_to_svg(&pd))?;
    }
    eprintln!("{} intervals written to {}", pd.len(), a.out.display());
    Ok(())
}

fn signature(a: &RunArgs, default: SignatureChoice) -> Result<SignatureChoice> {
    Ok(a.signature.as_deref().map(str::parse).transpose()?.unwrap_or(default))
}

fn run_experiment(cli: &Cli, a: &RunArgs) -> Result<()> {
    let lines = match a.lines {
        LinesArg::Default => LineChoice::Default,
        LinesArg::Extended => LineChoice::Extended,
    };
    let mut report: ExperimentReport = match a.experiment {
        Experiment::Holes => {
            let ds = io::read_dataset::<PointCloud>(&a.data, Some("holes"))?;
            let mut cfg = HolesConfig { jobs: cli.jobs, ..Default::default() };
            cfg.subsample = a.subsample.unwrap_or(if cli.paper_scale { 200 } else { cfg.subsample });
            cfg.signature = signature(a, cfg.signature)?;
            holes_pipeline(&ds, &cfg, cli.seed)?
        }
        Experiment::Curvature => {
            let train = io::read_dataset::<PolarCloud>(&a.data.join("train"), Some("curvature_train"))?;
            let test = io::read_dataset::<PolarCloud>(&a.data.join("test"), Some("curvature_test"))?;
            let mut cfg = CurvaturePipelineConfig { jobs: cli.jobs, ..Default::default() };
            cfg.signature = signature(a, cfg.signature)?;
            curvature_pipeline(&train, &test, &cfg, cli.seed)?
        }
        Experiment::Convexity => {
            let regular = io::read_dataset::<PointCloud>(&a.data.join("regular"), Some("convexity_regular"))?;
            let random = io::read_dataset::<PointCloud>(&a.data.join("random"), Some("convexity_random"))?;
            let mut cfg = ConvexityConfig { lines, jobs: cli.jobs, ..Default::default() };
            cfg.side = a.grid_side.unwrap_or(cfg.side);
            convexity_pipeline(&regular, &random, &cfg, cli.seed)?
        }
        Experiment::ConvexityMeasure => {
            let masks = io::read_dataset::<BinaryMask>(&a.data, Some("masks"))?;
            if a.grid_side.is_some_and(|s| masks.items.first().is_some_and(|m| m.side() != s)) {
                bail!("masks are {0}x{0}; regenerate them with the requested --grid-side", masks.items[0].side());
            }
            let cfg = RegressionConfig { lines, jobs: cli.jobs, ..Default::default() };
            convexity_regression(&masks, &cfg, cli.seed)?
        }
    };
    report.config["cli"] = serde_json::to_value(cli)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match a.format {
        Format::Json => io::write_report(&a.out, &report)?,
        Format::Csv => io::write_text(&a.out, &io::report_regimes_csv(&report))?,
    }
    println!("{}", report.summary());
    eprintln!("report written to {} in {:.1?}", a.out.display(), report.wall_time);
    Ok(())
}
