//! `kquantile` command-line front end. Every subcommand parses its flags,
//! calls one library operation, and formats the result.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kquantile::data::{load_samples_with, LoadOptions};
use kquantile::distributions::{
    banana_sample, spiral_sample_with, square_sample_with, SpiralParams, SquareParams, SPIRAL_DEFAULT_N,
    SQUARE_DEFAULT_N,
};
use kquantile::transform::DEFAULT_EXCLUDE_RADIUS;
use kquantile::{
    classify_outliers, contour_set, k_transform, render_preset, sample_mixture, save_matrix, solve_quantile,
    verify_corollary, verify_lemma4, verify_theorem, Direction, Error, FigurePreset, Format, MixtureModel, SampleSet,
    SolverConfig, VerificationReport,
};
use serde_json::{json, Value};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "kquantile", version, about = "Geometric quantiles via the K-transform")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (a directory for `figure`). Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic sample.
    Sample(SampleArgs),
    /// Evaluate the K-transform at a point.
    Ktransform(KtransformArgs),
    /// Solve for the geometric quantile of a direction.
    Quantile(QuantileArgs),
    /// Compute quantile contours for several radii.
    Contour(ContourArgs),
    /// Score every sample point against a contour threshold.
    Classify(ClassifyArgs),
    /// Check one of the Laplacian identities numerically.
    Verify(VerifyArgs),
    /// Regenerate a figure pair (domain and codomain SVG plus CSV).
    Figure(FigureArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Sample file; `.json` is read as JSON, anything else as CSV.
    #[arg(long)]
    data: PathBuf,
    /// Skip the first CSV row.
    #[arg(long)]
    header: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    Gauss075,
    Banana,
    Spiral,
    Square,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    dist: Dist,
    /// Sample size; each generator has its own default.
    #[arg(long)]
    n: Option<usize>,
    /// Correlation for `gauss075`.
    #[arg(long, default_value_t = 0.75, allow_hyphen_values = true)]
    rho: f64,
    /// Jitter standard deviation for `spiral` and `square`.
    #[arg(long)]
    jitter: Option<f64>,
}

#[derive(Args)]
struct KtransformArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    at: Vector,
}

#[derive(Args)]
struct QuantileArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    v: Vector,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct ContourArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_parser = parse_vector, default_value = "0.5,0.75,0.9")]
    radii: Vector,
    /// Vertices per contour.
    #[arg(long, default_value_t = kquantile::contour::DEFAULT_RESOLUTION)]
    m: usize,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    threshold: f64,
    /// Score each point against the full sample instead of the other n − 1.
    #[arg(long)]
    no_loo: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Identity {
    Lemma4,
    Theorem,
    Corollary,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    identity: Identity,
    /// Dimension of the standard normal test model.
    #[arg(long)]
    d: Option<usize>,
    /// Order of the poly-Laplacian (theorem only).
    #[arg(long, default_value_t = 1)]
    j: usize,
    #[arg(long)]
    n: Option<usize>,
    /// Finite-difference step.
    #[arg(long)]
    h: Option<f64>,
    /// Evaluation points, `;`-separated, each comma-separated.
    #[arg(long, value_parser = parse_points, allow_hyphen_values = true)]
    points: Option<Points>,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long, value_parser = parse_preset)]
    preset: FigurePreset,
    #[arg(long, default_value_t = kquantile::contour::DEFAULT_RESOLUTION)]
    m: usize,
}

/// A comma-separated vector flag.
#[derive(Clone)]
struct Vector(Vec<f64>);

/// A `;`-separated list of vectors.
#[derive(Clone)]
struct Points(Vec<Vec<f64>>);

fn parse_vector(text: &str) -> Result<Vector, String> {
    parse_components(text).map(Vector)
}

fn parse_points(text: &str) -> Result<Points, String> {
    text.split(';')
        .map(parse_components)
        .collect::<Result<_, _>>()
        .map(Points)
}

fn parse_components(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|part| {
            let x: f64 = part.trim().parse().map_err(|_| format!("{part:?} is not a number"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("{part:?} is not finite"))
            }
        })
        .collect()
}

fn parse_preset(text: &str) -> Result<FigurePreset, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn load(args: &DataArgs) -> Result<SampleSet, Error> {
    load_samples_with(
        &args.data,
        Format::from_path(&args.data),
        LoadOptions {
            skip_header: args.header,
        },
    )
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct Output {
    out: Option<PathBuf>,
    format: OutputFormat,
}

impl Output {
    /// Writes `csv` or the JSON document to `--out`, or prints it.
    fn emit(&self, command: &str, csv: String, payload: Value) -> Result<(), Error> {
        let text = match self.format {
            OutputFormat::Csv => csv,
            OutputFormat::Json => {
                let mut doc = json!({ "version": VERSION, "command": command });
                if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, payload) {
                    doc.extend(extra);
                }
                serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))? + "\n"
            }
        };
        match &self.out {
            Some(path) => write_text(path, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn sample(args: SampleArgs, seed: u64, output: &Output) -> Result<(), Error> {
    let set = match args.dist {
        Dist::Gauss075 => sample_mixture(
            &MixtureModel::correlated_gaussian(args.rho)?,
            args.n.unwrap_or(3000),
            seed,
        )?,
        Dist::Banana => banana_sample(args.n.unwrap_or(20_000), seed)?,
        Dist::Spiral => {
            let mut p = SpiralParams::default();
            p.jitter = args.jitter.unwrap_or(p.jitter);
            spiral_sample_with(args.n.unwrap_or(SPIRAL_DEFAULT_N), seed, p)?
        }
        Dist::Square => {
            let mut p = SquareParams::default();
            p.jitter = args.jitter.unwrap_or(p.jitter);
            square_sample_with(args.n.unwrap_or(SQUARE_DEFAULT_N), seed, p)?
        }
    };
    let rows = set.to_rows();
    match (&output.out, output.format) {
        (Some(path), OutputFormat::Csv) => save_matrix(&rows, path, Format::Csv),
        _ => output.emit("sample", kquantile::data::to_csv(&rows), json!({ "points": rows })),
    }
}

fn ktransform(args: KtransformArgs, output: &Output) -> Result<(), Error> {
    let set = load(&args.data)?;
    let t = k_transform(&set, &args.at.0, DEFAULT_EXCLUDE_RADIUS)?;
    let csv = format!("{}\n{}\n", join(&t.g), t.norm);
    output.emit("ktransform", csv, json!({ "at": args.at.0, "g": t.g, "norm": t.norm }))
}

fn quantile(args: QuantileArgs, output: &Output) -> Result<(), Error> {
    let set = load(&args.data)?;
    let v = Direction::new(args.v.0)?;
    let mut cfg = SolverConfig::default();
    cfg.tol = args.tol.unwrap_or(cfg.tol);
    cfg.max_iter = args.max_iter.unwrap_or(cfg.max_iter);
    let report = solve_quantile(&set, &v, &cfg)?;
    let mut csv = format!(
        "{}\niterations={} final_step={:e} converged={}",
        join(&report.quantile),
        report.iterations,
        report.final_step,
        report.converged
    );
    if let Some(i) = report.atom {
        csv.push_str(&format!(" atom={i}"));
    }
    csv.push('\n');
    let payload = json!({ "v": v.as_slice(), "report": report });
    output.emit("quantile", csv, payload)
}

fn contour(args: ContourArgs, output: &Output) -> Result<(), Error> {
    let set = load(&args.data)?;
    let contours = contour_set(&set, &args.radii.0, args.m, &SolverConfig::default())?;
    let payload = json!({ "radii": contours.radii, "m": contours.m, "polylines": contours.polylines });
    output.emit("contour", contours.to_csv(), payload)
}

fn classify(args: ClassifyArgs, output: &Output) -> Result<(), Error> {
    let set = load(&args.data)?;
    let scores = classify_outliers(&set, args.threshold, !args.no_loo)?;
    let mut csv = String::from("index,norm,is_outlier\n");
    for s in &scores {
        csv.push_str(&format!("{},{},{}\n", s.index, s.norm, s.is_outlier));
    }
    let flagged = scores.iter().filter(|s| s.is_outlier).count();
    let payload =
        json!({ "threshold": args.threshold, "leave_one_out": !args.no_loo, "flagged": flagged, "scores": scores });
    output.emit("classify", csv, payload)
}

fn axis_points(d: usize, radii: &[f64]) -> Vec<Vec<f64>> {
    radii
        .iter()
        .map(|&r| {
            let mut p = vec![0.0; d];
            p[0] = r;
            p
        })
        .collect()
}

fn verify(args: VerifyArgs, seed: u64, output: &Output) -> Result<(), Error> {
    let report: VerificationReport = match args.identity {
        Identity::Lemma4 => {
            let model = MixtureModel::standard_normal(args.d.unwrap_or(1))?;
            let points = match args.points {
                Some(points) => points.0.into_iter().flatten().collect(),
                None => vec![-1.0, 0.0, 1.0, 2.0],
            };
            verify_lemma4(
                &model,
                &points,
                args.n.unwrap_or(1_000_000),
                seed,
                args.h.unwrap_or(0.05),
            )?
        }
        Identity::Theorem => {
            let d = args.d.unwrap_or(3);
            let model = MixtureModel::standard_normal(d)?;
            let points = args.points.map(|p| p.0).unwrap_or_else(|| axis_points(d, &[0.5, 1.0]));
            let h = args.h.unwrap_or(if args.j == 1 { 0.05 } else { 0.25 });
            verify_theorem(&model, args.j, &points, args.n.unwrap_or(100_000), seed, h)?
        }
        Identity::Corollary => {
            let d = args.d.unwrap_or(3);
            let model = MixtureModel::standard_normal(d)?;
            let points = args.points.map(|p| p.0).unwrap_or_else(|| axis_points(d, &[0.5, 1.0]));
            verify_corollary(
                &model,
                &points,
                args.n.unwrap_or(1_000_000),
                seed,
                args.h.unwrap_or(1.0),
            )?
        }
    };
    println!("{}", report.table());
    if let Some(path) = &output.out {
        let doc = json!({ "version": VERSION, "command": "verify", "report": report });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))? + "\n";
        write_text(path, &text)?;
    } else if output.format == OutputFormat::Json {
        output.emit("verify", String::new(), json!({ "report": report }))?;
    }
    Ok(())
}

fn figure(args: FigureArgs, seed: u64, out: Option<PathBuf>, format: OutputFormat) -> Result<(), Error> {
    let dir = out.unwrap_or_else(|| PathBuf::from("."));
    let files = render_preset(args.preset, seed, args.m, &dir)?;
    let paths = [&files.sample_csv, &files.domain_svg, &files.codomain_svg];
    match format {
        OutputFormat::Csv => paths.iter().for_each(|p| println!("{}", p.display())),
        OutputFormat::Json => {
            let doc = json!({
                "version": VERSION,
                "command": "figure",
                "preset": args.preset.name(),
                "files": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))?
            );
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let output = Output {
        out: cli.out.clone(),
        format: cli.format,
    };
    match cli.command {
        Command::Sample(args) => sample(args, cli.seed, &output),
        Command::Ktransform(args) => ktransform(args, &output),
        Command::Quantile(args) => quantile(args, &output),
        Command::Contour(args) => contour(args, &output),
        Command::Classify(args) => classify(args, &output),
        Command::Verify(args) => verify(args, cli.seed, &output),
        Command::Figure(args) => figure(args, cli.seed, cli.out, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
