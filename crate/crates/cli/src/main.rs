use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sovf::bench::{make_point_grid, make_rayleigh_chain, sample_dense, sample_fn, Noise, Spacing};
use sovf::engine::{
    first_order_errors, fit_sovf1, fit_sovf2, fit_vf, init_pole_set, init_poles, second_order_errors,
};
use sovf::io::{
    errors_to_csv, fmt_f64, load_model, load_samples, read_to_string, report_to_csv, save_model,
    save_samples, write_atomic, ErrorTable, Model, EVAL_HEADER,
};
use sovf::types::{FitReport, InitStrategy, IterationConfig, PolePair, PolePairSet, PoleSet};
use sovf::Complex64;

#[derive(Parser)]
#[command(name = "sovf", version, about = "Structure-preserving vector fitting for modally damped systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a Rayleigh-damped chain or a stored model on a frequency grid.
    Sample(SampleArgs),
    /// Fit a model to frequency samples.
    Fit(FitArgs),
    /// Evaluate a stored model on a grid or on the points of a samples file.
    Eval(EvalArgs),
    /// Tabulate pointwise relative errors of several models against one data set.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

impl From<SpacingArg> for Spacing {
    fn from(s: SpacingArg) -> Self {
        match s {
            SpacingArg::Linear => Spacing::Linear,
            SpacingArg::Log => Spacing::Log,
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Lowest frequency in rad/s.
    #[arg(long)]
    fmin: Option<f64>,
    /// Highest frequency in rad/s.
    #[arg(long)]
    fmax: Option<f64>,
    /// Number of grid points (at least 2).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    count: Option<u64>,
    #[arg(long, value_enum, default_value = "linear")]
    spacing: SpacingArg,
}

impl GridArgs {
    fn points(&self) -> Result<Vec<Complex64>> {
        let (Some(lo), Some(hi), Some(count)) = (self.fmin, self.fmax, self.count) else {
            bail!("a grid needs --fmin, --fmax and --count");
        };
        Ok(make_point_grid(lo, hi, count as usize, self.spacing.into())?)
    }
}

#[derive(Args)]
struct SampleArgs {
    /// Number of masses in the Rayleigh-damped chain.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), conflicts_with = "model", required_unless_present = "model")]
    chain_n: Option<u64>,
    /// Mass-proportional damping coefficient.
    #[arg(long, default_value_t = 1e-3)]
    alpha: f64,
    /// Stiffness-proportional damping coefficient.
    #[arg(long, default_value_t = 1e-4)]
    beta: f64,
    /// Mass of each chain element.
    #[arg(long, default_value_t = 1.0)]
    m0: f64,
    /// Spring stiffness of each chain element.
    #[arg(long, default_value_t = 1e6)]
    k0: f64,
    /// Sample a stored model JSON instead of a chain.
    #[arg(long)]
    model: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    /// Append the complex conjugates of all samples.
    #[arg(long)]
    conj_close: bool,
    /// Relative standard deviation of multiplicative complex Gaussian noise.
    #[arg(long)]
    noise: Option<f64>,
    /// Seed for the noise generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output samples CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Vf,
    Sovf1,
    Sovf2,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Logspace,
    Linspace,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, value_enum)]
    method: Method,
    /// Number of poles (vf) or pole pairs (sovf1, sovf2).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    order: u64,
    /// Samples CSV.
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    /// Convergence threshold on the largest denominator weight.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Convergence threshold on the largest relative support point movement.
    #[arg(long, default_value_t = 1e-10)]
    pole_tol: f64,
    /// Placement of the initial support points.
    #[arg(long, value_enum, default_value = "logspace", conflicts_with = "init_points")]
    init: InitArg,
    /// CSV of initial support points (`re,im` per row; consecutive rows form
    /// pairs for the structured methods).
    #[arg(long)]
    init_points: Option<PathBuf>,
    /// Fit over complex unknowns without conjugate symmetry.
    #[arg(long)]
    no_realness: bool,
    /// Keep right half-plane support points instead of reflecting them.
    #[arg(long)]
    no_stability: bool,
    /// Output model JSON.
    #[arg(long)]
    out: PathBuf,
    /// Per-iteration report CSV.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Pointwise relative error CSV of the fitted model.
    #[arg(long)]
    errors: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Model JSON.
    #[arg(long)]
    model: PathBuf,
    /// Evaluate at the points of this samples CSV instead of a grid.
    #[arg(long, conflicts_with_all = ["fmin", "fmax", "count"])]
    samples: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Model JSON; repeatable.
    #[arg(long = "model")]
    models: Vec<PathBuf>,
    /// Errors CSV written by `fit --errors`; repeatable.
    #[arg(long = "errors")]
    errors: Vec<PathBuf>,
    /// Samples CSV the errors are measured against.
    #[arg(long)]
    samples: PathBuf,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_sample(a: SampleArgs) -> Result<()> {
    let points = a.grid.points()?;
    let noise = a.noise.map(|relative_sigma| Noise { relative_sigma, seed: a.seed });
    let samples = match (&a.model, a.chain_n) {
        (Some(path), _) => {
            let model = load_model(path).with_context(|| format!("reading {}", path.display()))?;
            sample_fn(|s| model.eval(s), &points, a.conj_close, noise)?
        }
        (None, Some(n)) => {
            let system = make_rayleigh_chain(n as usize, a.alpha, a.beta, a.m0, a.k0)?;
            sample_dense(&system, &points, a.conj_close, noise)?
        }
        (None, None) => bail!("either --chain-n or --model is required"),
    };
    save_samples(&a.out, &samples)?;
    eprintln!("wrote {} samples to {}", samples.len(), a.out.display());
    Ok(())
}

fn read_init_points(path: &Path) -> Result<Vec<Complex64>> {
    let text = read_to_string(path)?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        // optional header row
        if i == 0 && fields[0].parse::<f64>().is_err() {
            continue;
        }
        if fields.len() != 2 {
            bail!("{}:{}: expected `re,im`", path.display(), i + 1);
        }
        let re: f64 = fields[0].parse().with_context(|| format!("{}:{}", path.display(), i + 1))?;
        let im: f64 = fields[1].parse().with_context(|| format!("{}:{}", path.display(), i + 1))?;
        points.push(Complex64::new(re, im));
    }
    Ok(points)
}

fn cmd_fit(a: FitArgs) -> Result<()> {
    let samples = load_samples(&a.samples).with_context(|| format!("reading {}", a.samples.display()))?;
    let order = a.order as usize;
    let strategy = match (&a.init_points, a.init) {
        (Some(_), _) => InitStrategy::UserSupplied,
        (None, InitArg::Logspace) => InitStrategy::LogspaceImag,
        (None, InitArg::Linspace) => InitStrategy::LinspaceImag,
    };
    let config = IterationConfig {
        order,
        max_iters: a.max_iter,
        weight_tol: a.tol,
        pole_move_tol: a.pole_tol,
        enforce_realness: !a.no_realness,
        enforce_stability: !a.no_stability,
        init_strategy: strategy,
    };
    let user_points = a.init_points.as_deref().map(read_init_points).transpose()?;
    let range = samples.frequency_range();

    let (model, report, errors): (Model, FitReport, Vec<f64>) = match a.method {
        Method::Vf => {
            let init = match user_points {
                Some(p) => PoleSet::new(p)?,
                None => init_pole_set(strategy, order, range)?,
            };
            let (m, report) = fit_vf(&samples, &init, &config)?;
            let errors = first_order_errors(&m, &samples)?;
            (Model::FirstOrder(m), report, errors)
        }
        Method::Sovf1 | Method::Sovf2 => {
            let init = match user_points {
                Some(p) => {
                    if p.len() % 2 != 0 {
                        bail!("structured methods need an even number of initial points");
                    }
                    let pairs = p
                        .chunks(2)
                        .map(|c| PolePair::from_lambdas(c[0], c[1]))
                        .collect::<sovf::Result<Vec<_>>>()?;
                    PolePairSet::new(pairs)?
                }
                None => init_poles(strategy, order, range)?,
            };
            let fit = if a.method == Method::Sovf1 { fit_sovf1 } else { fit_sovf2 };
            let (m, report) = fit(&samples, &init, &config)?;
            let errors = second_order_errors(&m, &samples)?;
            (Model::SecondOrder(m), report, errors)
        }
    };

    save_model(&a.out, &model)?;
    if let Some(path) = &a.report {
        write_atomic(path, report_to_csv(&report).as_bytes())?;
    }
    if let Some(path) = &a.errors {
        write_atomic(path, errors_to_csv(&samples, &errors).as_bytes())?;
    }
    let max_err = errors.iter().copied().fold(0.0, f64::max);
    eprintln!(
        "{} iterations, termination={}, weights_converged={}, max relative error {max_err:.3e}",
        report.iterations(),
        report.termination.as_str(),
        report.weights_converged
    );
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let model = load_model(&a.model).with_context(|| format!("reading {}", a.model.display()))?;
    let points = match &a.samples {
        Some(path) => load_samples(path)?.points().to_vec(),
        None => a.grid.points()?,
    };
    let mut out = String::from(EVAL_HEADER);
    out.push('\n');
    let mut flagged = 0;
    for s in &points {
        let h = match model.eval(*s) {
            Ok(h) if h.re.is_finite() && h.im.is_finite() => h,
            _ => {
                flagged += 1;
                Complex64::new(f64::NAN, f64::NAN)
            }
        };
        out.push_str(&format!("{},{},{},{}\n", fmt_f64(s.im), fmt_f64(h.re), fmt_f64(h.im), fmt_f64(h.norm())));
    }
    write_atomic(&a.out, out.as_bytes())?;
    if flagged > 0 {
        eprintln!("warning: {flagged} point(s) hit a model pole and were written as NaN");
    }
    Ok(())
}

fn column_name(path: &Path, taken: &[String]) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "model".into());
    let mut name = stem.clone();
    let mut k = 2;
    while taken.contains(&name) {
        name = format!("{stem}_{k}");
        k += 1;
    }
    name
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    if a.models.is_empty() && a.errors.is_empty() {
        bail!("compare needs at least one --model or --errors file");
    }
    let samples = load_samples(&a.samples).with_context(|| format!("reading {}", a.samples.display()))?;
    let mut table = ErrorTable::new(samples.points().iter().map(|p| p.im).collect());
    for path in &a.models {
        let model = load_model(path).with_context(|| format!("reading {}", path.display()))?;
        let name = column_name(path, &table.names);
        table.push_model(&name, &model, &samples)?;
    }
    for path in &a.errors {
        let text = read_to_string(path)?;
        let name = column_name(path, &table.names);
        table.push_errors_csv(&name, &text)?;
    }
    write_atomic(&a.out, table.to_csv().as_bytes())?;
    for (j, name) in table.names.iter().enumerate() {
        eprintln!("{name}: max {:.3e}, mean {:.3e}", table.max(j), table.mean(j));
    }
    Ok(())
}
