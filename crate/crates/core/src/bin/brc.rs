//! Command-line front end: divergence evaluation, centroid solving, mixture
//! simplification, solver comparison, and skew-orbit plot data.
//!
//! Exit codes: 0 success, 2 input/domain error, 3 non-convergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use burbea_rao::clustering::{
    assign_points, compare_solvers, fit_mixture, hierarchical_simplify, kmeans_bhattacharyya,
    random_instances, ComparisonReport, MixtureModel, PointCloud,
};
use burbea_rao::expfam::{ExpFamily, SourceParam};
use burbea_rao::generators::{NegRenyi, NegShannon, NegShannonExtended, Quadratic};
use burbea_rao::ppm;
use burbea_rao::solver::{
    bregman_left_centroid, bregman_right_centroid, skew_orbit, solve_centroid, SolverConfig,
    WeightedSet,
};
use burbea_rao::tailored::solve_tailored;
use burbea_rao::{
    CompositeParam, Error, GaussianParam, Generator, Result, SkewWeight, SolverReport,
};

#[derive(Parser)]
#[command(
    name = "brc",
    about = "Jensen-type divergences, Bhattacharyya centroids, and Gaussian mixture simplification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate statistical distances between two parameters of one family.
    Divergence(DivergenceArgs),
    /// Solve for the centroid of a weighted parameter set.
    Centroid(CentroidArgs),
    /// Fit and/or simplify a Gaussian mixture (mixture JSON, PPM image, or point CSV in).
    Simplify(SimplifyArgs),
    /// Compare the generic and tailored centroid solvers on a batch of instances.
    Compare(CompareArgs),
    /// Emit the orbit of skew centroids between the two sided centroids.
    Orbit(OrbitArgs),
}

#[derive(Args)]
struct DivergenceArgs {
    /// Family: poisson | gaussian | multinomial | mvgaussian
    #[arg(long)]
    family: String,
    /// Skew factor for the Chernoff coefficient.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// First parameter as a JSON object.
    p: String,
    /// Second parameter as a JSON object.
    q: String,
}

#[derive(Args)]
struct CentroidArgs {
    /// Family for parameter-space input: poisson | gaussian | multinomial | mvgaussian
    #[arg(long, conflicts_with = "generator")]
    family: Option<String>,
    /// Raw generator for vector input: quadratic | xlogx | xlogx-ext | renyi:<order>
    #[arg(long)]
    generator: Option<String>,
    #[arg(long, value_enum, default_value_t = Method::Generic)]
    method: Method,
    /// Uniform skew factor applied to every point.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[command(flatten)]
    solver: SolverOpts,
    /// Input JSON: {"points": [{"weight": w, "param": {...}} | {"weight": w, "vec": [...]}]}
    input: PathBuf,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimplifyArgs {
    /// Target component count.
    #[arg(long)]
    k: usize,
    /// Components fitted from raw points before simplification (image/CSV input).
    #[arg(long = "fit-k", default_value_t = 48)]
    fit_k: usize,
    #[arg(long, value_enum, default_value_t = SimplifyMethod::Hierarchical)]
    method: SimplifyMethod,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scale factor applied to the positional (x, y) block of image clouds.
    #[arg(long = "xy-scale", default_value_t = 1.0)]
    xy_scale: f64,
    /// Also write per-point hard assignments (CSV of component indices).
    #[arg(long)]
    assign: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverOpts,
    /// Mixture JSON (.json), PPM image (.ppm/.pnm), or point CSV (.csv).
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Number of generated instances when no input file is given.
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Dimension of generated instances.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Components per generated instance.
    #[arg(long, default_value_t = 5)]
    components: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverOpts,
    /// Optional JSON array of mixture objects to use as instances.
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OrbitArgs {
    #[arg(long, conflicts_with = "generator")]
    family: Option<String>,
    #[arg(long)]
    generator: Option<String>,
    /// Comma-separated skew grid; defaults to a grid with near-0/near-1 ends.
    #[arg(long)]
    alphas: Option<String>,
    #[command(flatten)]
    solver: SolverOpts,
    /// Input JSON with the weighted point set (same schema as `centroid`).
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverOpts {
    /// Relative step tolerance of the fixed-point iteration.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long = "max-iters", default_value_t = 200)]
    max_iters: usize,
}

impl SolverOpts {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            tolerance: self.tol,
            max_iterations: self.max_iters,
            ..SolverConfig::default()
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Generic,
    Tailored,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimplifyMethod {
    Hierarchical,
    Kmeans,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Divergence(args) => cmd_divergence(args),
        Command::Centroid(args) => cmd_centroid(args),
        Command::Simplify(args) => cmd_simplify(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Orbit(args) => cmd_orbit(args),
    }
}

/// 17 significant digits, enough to reconstruct the exact double.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn family_for_payload(name: &str, payload: &serde_json::Value) -> Result<ExpFamily> {
    match name {
        "poisson" => Ok(ExpFamily::poisson()),
        "gaussian" => Ok(ExpFamily::gaussian()),
        "multinomial" => {
            let len = payload
                .get("probs")
                .and_then(|p| p.as_array())
                .map(Vec::len)
                .ok_or_else(|| Error::Parse("multinomial parameter needs a probs array".into()))?;
            ExpFamily::multinomial(len)
        }
        "mvgaussian" => {
            let len = payload
                .get("mean")
                .and_then(|p| p.as_array())
                .map(Vec::len)
                .ok_or_else(|| Error::Parse("mvgaussian parameter needs a mean array".into()))?;
            ExpFamily::mv_gaussian(len)
        }
        other => Err(Error::Parse(format!(
            "unknown family {other:?} (expected poisson, gaussian, multinomial, or mvgaussian)"
        ))),
    }
}

fn parse_json(text: &str) -> Result<serde_json::Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn cmd_divergence(args: DivergenceArgs) -> Result<ExitCode> {
    let p_val = parse_json(&args.p)?;
    let fam = family_for_payload(&args.family, &p_val)?;
    let p = fam.source_from_json(&args.p)?;
    let q = fam.source_from_json(&args.q)?;
    let alpha = SkewWeight::new(args.alpha)?;
    let result = json!({
        "bhattacharyya": fam.bhattacharyya(&p, &q)?,
        "hellinger": fam.hellinger(&p, &q)?,
        "kl": fam.kl_divergence(&p, &q)?,
        "chernoff_alpha": fam.chernoff_coefficient(&p, &q, alpha)?,
    });
    println!("{}", serde_json::to_string_pretty(&result).expect("serializable"));
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct PointSetIn {
    points: Vec<PointIn>,
}

#[derive(Deserialize)]
struct PointIn {
    weight: f64,
    #[serde(default)]
    param: Option<serde_json::Value>,
    #[serde(default)]
    vec: Option<Vec<f64>>,
}

fn read_point_set(path: &Path) -> Result<PointSetIn> {
    let text = std::fs::read_to_string(path)?;
    let set: PointSetIn =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if set.points.is_empty() {
        return Err(Error::Parse("input has no points".into()));
    }
    Ok(set)
}

fn normalized_weights(points: &[PointIn]) -> Result<Vec<f64>> {
    if points
        .iter()
        .any(|p| !p.weight.is_finite() || p.weight < 0.0)
    {
        return Err(Error::Weight(
            "weights must be finite and non-negative".into(),
        ));
    }
    let total: f64 = points.iter().map(|p| p.weight).sum();
    if total <= 0.0 {
        return Err(Error::Weight("total weight must be positive".into()));
    }
    Ok(points.iter().map(|p| p.weight / total).collect())
}

/// Family-mode set: parse each "param" payload and map to natural parameters.
fn family_point_set(
    family_name: &str,
    set: &PointSetIn,
) -> Result<(ExpFamily, Vec<SourceParam>, Vec<f64>)> {
    let first = set.points[0]
        .param
        .as_ref()
        .ok_or_else(|| Error::Parse("family input points need a \"param\" object".into()))?;
    let fam = family_for_payload(family_name, first)?;
    let mut sources = Vec::with_capacity(set.points.len());
    for p in &set.points {
        let payload = p
            .param
            .as_ref()
            .ok_or_else(|| Error::Parse("family input points need a \"param\" object".into()))?;
        sources.push(fam.source_from_json(&payload.to_string())?);
    }
    let weights = normalized_weights(&set.points)?;
    Ok((fam, sources, weights))
}

type BoxedGenerator = Box<dyn Generator + Send + Sync>;

fn generator_point_set(
    generator_name: &str,
    set: &PointSetIn,
) -> Result<(BoxedGenerator, Vec<CompositeParam>, Vec<f64>)> {
    let mut points = Vec::with_capacity(set.points.len());
    for p in &set.points {
        let vec = p
            .vec
            .as_ref()
            .ok_or_else(|| Error::Parse("generator input points need a \"vec\" array".into()))?;
        points.push(CompositeParam::vector(vec.clone()));
    }
    let dim = points[0].vec_dim();
    let generator: BoxedGenerator = match generator_name {
        "quadratic" => Box::new(Quadratic::identity(dim)),
        "xlogx" => Box::new(NegShannon::new(dim)),
        "xlogx-ext" => Box::new(NegShannonExtended::new(dim)),
        other => {
            if let Some(order) = other.strip_prefix("renyi:") {
                let order: f64 = order
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad Renyi order {order:?}")))?;
                Box::new(NegRenyi::new(dim, order)?)
            } else {
                return Err(Error::Parse(format!(
                    "unknown generator {other:?} (expected quadratic, xlogx, xlogx-ext, renyi:<order>)"
                )));
            }
        }
    };
    let weights = normalized_weights(&set.points)?;
    Ok((generator, points, weights))
}

fn report_json(report: &SolverReport) -> serde_json::Value {
    json!({
        "iterations": report.iterations,
        "converged": report.converged,
        "final_step": report.final_step,
        "energy_trace": report.energy_trace,
    })
}

fn cmd_centroid(args: CentroidArgs) -> Result<ExitCode> {
    let set = read_point_set(&args.input)?;
    let cfg = args.solver.config();
    let skew = SkewWeight::new(args.alpha)?;

    let (result, converged) = match (&args.family, &args.generator, args.method) {
        (Some(fam_name), None, Method::Generic) => {
            let (fam, sources, weights) = family_point_set(fam_name, &set)?;
            let naturals: Vec<CompositeParam> = sources
                .iter()
                .map(|s| fam.to_natural(s))
                .collect::<Result<_>>()?;
            let wset = WeightedSet::new(naturals, weights)?.with_uniform_skew(skew);
            let logn = fam.log_normalizer();
            let (centroid, report) = solve_centroid(logn.as_ref(), &wset, &cfg)?;
            let source = fam.to_source(&centroid)?;
            (
                json!({
                    "centroid": fam.source_to_json(&source)?,
                    "report": report_json(&report),
                }),
                report.converged,
            )
        }
        (Some(fam_name), None, Method::Tailored) => {
            if fam_name != "mvgaussian" {
                return Err(Error::Parse(
                    "--method tailored requires --family mvgaussian".into(),
                ));
            }
            let (fam, sources, weights) = family_point_set(fam_name, &set)?;
            let comps: Vec<GaussianParam> = sources
                .into_iter()
                .map(|s| match s {
                    SourceParam::MvGaussian(g) => Ok(g),
                    _ => Err(Error::Parse("expected mvgaussian parameters".into())),
                })
                .collect::<Result<_>>()?;
            let (center, report) = solve_tailored(&comps, &weights, &cfg)?;
            let converged = report.converged;
            (
                json!({
                    "centroid": fam.source_to_json(&SourceParam::MvGaussian(center))?,
                    "report": {
                        "iterations": report.iterations,
                        "converged": report.converged,
                        "failure": report.failure,
                        "energy_trace": report.energy_trace,
                    },
                }),
                converged,
            )
        }
        (None, Some(gen_name), Method::Generic) => {
            let (generator, points, weights) = generator_point_set(gen_name, &set)?;
            let wset = WeightedSet::new(points, weights)?.with_uniform_skew(skew);
            let (centroid, report) = solve_centroid(generator.as_ref(), &wset, &cfg)?;
            (
                json!({
                    "centroid": {"vec": centroid.vec_part},
                    "report": report_json(&report),
                }),
                report.converged,
            )
        }
        (None, Some(_), Method::Tailored) => {
            return Err(Error::Parse(
                "--method tailored requires --family mvgaussian".into(),
            ));
        }
        _ => {
            return Err(Error::Parse(
                "exactly one of --family or --generator is required".into(),
            ));
        }
    };

    let mut text = serde_json::to_string_pretty(&result).expect("serializable");
    text.push('\n');
    emit(&args.out, &text)?;
    Ok(if converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn read_point_csv(path: &Path) -> Result<PointCloud> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue; // header row
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad value {cell:?}", i + 1)))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    PointCloud::from_rows(&rows)
}

fn cmd_simplify(args: SimplifyArgs) -> Result<ExitCode> {
    let cfg = args.solver.config();
    let ext = args
        .input
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();

    let (mixture, cloud): (MixtureModel, Option<PointCloud>) = match ext.as_str() {
        "ppm" | "pnm" => {
            let mut pc = ppm::ingest_image(&args.input)?;
            if args.xy_scale != 1.0 {
                pc.scale_columns(3, args.xy_scale);
            }
            let fitted = fit_mixture(&pc, args.fit_k, args.seed, &cfg)?;
            (fitted, Some(pc))
        }
        "csv" => {
            let pc = read_point_csv(&args.input)?;
            let fitted = fit_mixture(&pc, args.fit_k, args.seed, &cfg)?;
            (fitted, Some(pc))
        }
        "json" => {
            let text = std::fs::read_to_string(&args.input)?;
            let m: MixtureModel = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("{}: {e}", args.input.display())))?;
            (m, None)
        }
        other => {
            return Err(Error::Parse(format!(
                "unsupported input extension {other:?} (expected .json, .ppm, .pnm, or .csv)"
            )));
        }
    };

    let simplified = match args.method {
        SimplifyMethod::Hierarchical => hierarchical_simplify(&mixture, args.k, &cfg)?,
        SimplifyMethod::Kmeans => kmeans_bhattacharyya(
            mixture.components(),
            mixture.weights(),
            args.k,
            args.seed,
            &cfg,
        )?,
    };

    if let Some(assign_path) = &args.assign {
        let Some(pc) = &cloud else {
            return Err(Error::Parse(
                "--assign needs point input (PPM image or CSV), not a mixture".into(),
            ));
        };
        let assignment = assign_points(&simplified, pc)?;
        let mut csv = String::from("component\n");
        for a in assignment {
            csv.push_str(&a.to_string());
            csv.push('\n');
        }
        std::fs::write(assign_path, csv)?;
    }

    let mut text = serde_json::to_string_pretty(&simplified).expect("serializable");
    text.push('\n');
    emit(&args.out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn comparison_csv(report: &ComparisonReport) -> String {
    let mut csv = String::from(
        "instance_id,energy_generic,energy_tailored,winner,iters_generic,iters_tailored,failure\n",
    );
    for row in &report.rows {
        let opt_f = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let opt_u = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.instance_id,
            opt_f(row.energy_generic),
            opt_f(row.energy_tailored),
            row.winner,
            opt_u(row.iters_generic),
            opt_u(row.iters_tailored),
            csv_quote(row.failure.as_deref().unwrap_or("")),
        ));
    }
    csv
}

fn cmd_compare(args: CompareArgs) -> Result<ExitCode> {
    let cfg = args.solver.config();
    let instances: Vec<(Vec<GaussianParam>, Vec<f64>)> = match &args.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let mixtures: Vec<MixtureModel> = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            mixtures
                .into_iter()
                .map(|m| (m.components().to_vec(), m.weights().to_vec()))
                .collect()
        }
        None => random_instances(args.instances, args.dim, args.components, args.seed),
    };
    let report = compare_solvers(&instances, &cfg)?;
    let s = &report.summary;
    eprintln!(
        "instances={} generic_correct={:.1}% tailored_correct={:.1}% \
         mean_iters_generic={:.2} mean_iters_tailored={:.2} failures={}",
        s.instances,
        100.0 * s.generic_correct_fraction,
        100.0 * s.tailored_correct_fraction,
        s.mean_iters_generic,
        s.mean_iters_tailored,
        s.failures,
    );
    emit(&args.out, &comparison_csv(&report))?;
    Ok(ExitCode::SUCCESS)
}

fn default_alpha_grid() -> Vec<f64> {
    let mut grid = vec![1e-3, 0.01, 0.05];
    for i in 1..10 {
        grid.push(i as f64 / 10.0);
    }
    grid.extend([0.95, 0.99, 1.0 - 1e-3]);
    grid
}

fn parse_alpha_grid(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad alpha value {tok:?}")))
        })
        .collect()
}

fn cmd_orbit(args: OrbitArgs) -> Result<ExitCode> {
    let set = read_point_set(&args.input)?;
    let cfg = args.solver.config();
    let alphas = match &args.alphas {
        Some(spec) => parse_alpha_grid(spec)?,
        None => default_alpha_grid(),
    };

    // Solve in the working space, then flatten each centroid to coordinates:
    // raw vectors for generators, source coordinates for families.
    let rows: Vec<(String, Vec<f64>)> = match (&args.family, &args.generator) {
        (Some(fam_name), None) => {
            let (fam, sources, weights) = family_point_set(fam_name, &set)?;
            let naturals: Vec<CompositeParam> = sources
                .iter()
                .map(|s| fam.to_natural(s))
                .collect::<Result<_>>()?;
            let wset = WeightedSet::new(naturals, weights)?;
            let logn = fam.log_normalizer();
            let orbit = skew_orbit(logn.as_ref(), &wset, &alphas, &cfg)?;
            let mut rows = Vec::new();
            let left = bregman_left_centroid(logn.as_ref(), &wset)?;
            rows.push((
                "bregman_left".to_string(),
                flatten_source(&fam, &fam.to_source(&left)?),
            ));
            for (&a, c) in alphas.iter().zip(&orbit) {
                rows.push((fmt_f64(a), flatten_source(&fam, &fam.to_source(c)?)));
            }
            let right = bregman_right_centroid(&wset)?;
            rows.push((
                "bregman_right".to_string(),
                flatten_source(&fam, &fam.to_source(&right)?),
            ));
            rows
        }
        (None, Some(gen_name)) => {
            let (generator, points, weights) = generator_point_set(gen_name, &set)?;
            let wset = WeightedSet::new(points, weights)?;
            let orbit = skew_orbit(generator.as_ref(), &wset, &alphas, &cfg)?;
            let mut rows = Vec::new();
            let left = bregman_left_centroid(generator.as_ref(), &wset)?;
            rows.push(("bregman_left".to_string(), left.vec_part));
            for (&a, c) in alphas.iter().zip(&orbit) {
                rows.push((fmt_f64(a), c.vec_part.clone()));
            }
            let right = bregman_right_centroid(&wset)?;
            rows.push(("bregman_right".to_string(), right.vec_part));
            rows
        }
        _ => {
            return Err(Error::Parse(
                "exactly one of --family or --generator is required".into(),
            ));
        }
    };

    let width = rows[0].1.len();
    let mut csv = String::from("alpha");
    for i in 0..width {
        csv.push_str(&format!(",c{i}"));
    }
    csv.push('\n');
    for (label, coords) in rows {
        csv.push_str(&label);
        for v in coords {
            csv.push(',');
            csv.push_str(&fmt_f64(v));
        }
        csv.push('\n');
    }
    emit(&args.out, &csv)?;
    Ok(ExitCode::SUCCESS)
}

/// Flatten a source parameter to plot-ready coordinates.
fn flatten_source(fam: &ExpFamily, s: &SourceParam) -> Vec<f64> {
    let _ = fam;
    match s {
        SourceParam::Poisson { rate } => vec![*rate],
        SourceParam::Gaussian { mean, variance } => vec![*mean, *variance],
        SourceParam::Multinomial { probs } => probs.clone(),
        SourceParam::MvGaussian(g) => {
            let mut out = g.mean().to_vec();
            for row in g.covariance().to_full() {
                out.extend(row);
            }
            out
        }
    }
}
