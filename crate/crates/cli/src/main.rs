use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use radius_lab::bounds::{BoundContext, BoundId, BoundParams, EvalOptions};
use radius_lab::harness::{run_sweep, write_report, SweepConfig};
use radius_lab::linalg::{abs_value, general_eig, ScalarFn};
use radius_lab::numrange::{boundary_csv, boundary_svg, numerical_radius, numerical_range_boundary};
use radius_lab::sphere::{inf_xi_quadratic_deviation, kian_deficiency, inf_xi_variance_ratio, xi_pencil, OptOptions, OracleMode, SphereOptResult};
use radius_lab::{generate, read_matrix_file, CVector, ComplexMatrix, Error, GeneratorSpec};

/// Numerical radius and radius-inequality lab.
#[derive(Parser)]
#[command(name = "radius-lab", version)]
struct Cli {
    /// Absolute tolerance for numerical radius computations.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Seed for optimizer starts (and the sweep master seed for `verify`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Matrix document `{"dim": n, "rows": [[[re, im], ...], ...]}`.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Generator spec, `kind:dim:seed` or `named:tag`.
    #[arg(long = "gen")]
    generator: Option<String>,
}

impl Input {
    fn load(&self) -> Result<ComplexMatrix, Error> {
        match (&self.matrix, &self.generator) {
            (Some(path), _) => read_matrix_file(path).map_err(|e| match e {
                Error::Io(io) => Error::Parse(format!("{}: {io}", path.display())),
                other => other,
            }),
            (None, Some(spec)) => generate(&spec.parse::<GeneratorSpec>()?),
            (None, None) => unreachable!("clap enforces one input"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum XiKind {
    Pencil,
    #[value(alias = "thm29")]
    Quadratic,
    #[value(alias = "thm35")]
    Variance,
    /// Deficiency of `|A|`, `|A*|` with equal weights.
    Kian,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Numerical radius with certified error and witness vector.
    Radius {
        #[command(flatten)]
        input: Input,
    },
    /// Sphere infima: pencil ratio, quadratic deviation, variance ratio.
    Xi {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "all")]
        kind: XiKind,
        /// Number of optimizer starts.
        #[arg(long, default_value_t = 64)]
        starts: usize,
        /// Force the grid oracle (dimension 2 or 3 only).
        #[arg(long)]
        oracle: bool,
        /// Exponent for `--kind kian`.
        #[arg(long, default_value_t = 2.0)]
        r: f64,
    },
    /// Evaluate catalog bounds; one JSON report per line.
    Bounds {
        #[command(flatten)]
        input: Input,
        /// Bound id or `all`.
        #[arg(long, default_value = "all")]
        bound: String,
        /// Exponent for the parametrized entries (default: 1, 1.5 and 2).
        #[arg(long)]
        r: Option<f64>,
        /// Scalar function for `thm24`, `identity` or `power:R`.
        #[arg(long)]
        f: Option<String>,
    },
    /// Run a sweep configuration; exit status 1 when any bound is violated.
    Verify {
        /// Sweep configuration file.
        config: PathBuf,
        /// Worker count (overridden by RADIUS_LAB_THREADS).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Sample the boundary of the numerical range as CSV, optionally SVG.
    RangePlot {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        /// Also write an SVG drawing here.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

enum Failure {
    Usage(Error),
    Violations(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn vector_json(x: &CVector) -> serde_json::Value {
    serde_json::Value::Array(x.iter().map(|z| json!([z.re, z.im])).collect())
}

fn opt_json(r: &SphereOptResult) -> serde_json::Value {
    json!({
        "value": r.value,
        "minimizer": vector_json(&r.minimizer),
        "gradient_norm": r.gradient_norm,
        "starts_used": r.starts_used,
        "oracle_value": r.oracle_value,
        "certified_lower": r.certified_lower,
        "certified": r.certified,
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out = cli.out.as_deref();
    if !(cli.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("--tol must be positive, got {}", cli.tol)).into());
    }
    match cli.command {
        Command::Radius { input } => {
            let a = input.load()?;
            let r = numerical_radius(&a, cli.tol)?;
            let mut text = format!(
                "omega = {}\ntheta_star = {}\ncertified_error = {:e}\n",
                r.omega, r.theta_star, r.certified_error
            );
            match &r.witness {
                Some(x) => text.push_str(&format!("witness = {}\n", vector_json(x))),
                None => text.push_str("witness = none\n"),
            }
            emit(out, &text)?;
        }
        Command::Xi {
            input,
            kind,
            starts,
            oracle,
            r,
        } => {
            let a = input.load()?;
            let opts = OptOptions {
                starts,
                seed: cli.seed.unwrap_or(0),
                oracle: if oracle { OracleMode::Always } else { OracleMode::Auto },
                ..OptOptions::default()
            };
            let mut doc = serde_json::Map::new();
            if matches!(kind, XiKind::Pencil | XiKind::All) {
                doc.insert("pencil_ratio".into(), opt_json(&xi_pencil(&a)?));
            }
            if matches!(kind, XiKind::Quadratic | XiKind::All) {
                doc.insert("quadratic_deviation".into(), opt_json(&inf_xi_quadratic_deviation(&a, &opts)?));
            }
            if matches!(kind, XiKind::Variance | XiKind::All) {
                let value = match inf_xi_variance_ratio(&a, &opts) {
                    Ok(r) => opt_json(&r),
                    Err(Error::NotInvertible { .. }) if matches!(kind, XiKind::All) => {
                        json!({"applicable": false, "reason": "not-invertible"})
                    }
                    Err(e) => return Err(e.into()),
                };
                doc.insert("variance_ratio".into(), value);
            }
            if matches!(kind, XiKind::Kian) {
                let ops = [abs_value(&a)?, abs_value(&a.adjoint())?];
                doc.insert("kian_deficiency".into(), opt_json(&kian_deficiency(&ops, &[0.5, 0.5], r, &opts)?));
            }
            let text = serde_json::to_string_pretty(&doc).expect("serializes") + "\n";
            emit(out, &text)?;
        }
        Command::Bounds { input, bound, r, f } => {
            let a = input.load()?;
            let f = f.map(|s| s.parse::<ScalarFn>()).transpose()?;
            let opts = EvalOptions {
                radius_tol: cli.tol,
                opt: OptOptions {
                    seed: cli.seed.unwrap_or(0),
                    ..OptOptions::default()
                },
            };
            let ids: Vec<BoundId> = if bound == "all" {
                BoundId::radius_bounds().collect()
            } else {
                let id: BoundId = bound.parse()?;
                if id.is_primitive() {
                    return Err(Error::InvalidArgument(format!("`{id}` takes scalar or vector operands, not a matrix")).into());
                }
                vec![id]
            };
            let r_values: Vec<f64> = match r {
                Some(r) => vec![r],
                None => radius_lab::bounds::DEFAULT_R_VALUES.to_vec(),
            };
            let ctx = BoundContext::new(&a, &opts)?;
            let mut text = String::new();
            for id in ids {
                let params: Vec<BoundParams> = if id.is_parametrized() {
                    r_values.iter().map(|&r| BoundParams { r, f }).collect()
                } else {
                    vec![BoundParams::default()]
                };
                for p in params {
                    let report = ctx.evaluate(id, &p)?;
                    text.push_str(&serde_json::to_string(&report).expect("serializes"));
                    text.push('\n');
                }
            }
            emit(out, &text)?;
        }
        Command::Verify { config, threads } => {
            let mut config = SweepConfig::from_file(&config)?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            if threads.is_some() {
                config.threads = threads;
            }
            let report = run_sweep(&config)?;
            let target = out.map(Path::to_path_buf).or_else(|| config.output.clone());
            match target {
                Some(path) => write_report(&report, &path)?,
                None => emit(None, &(report.to_json() + "\n"))?,
            }
            for b in &report.bounds {
                eprintln!(
                    "{:<24} evaluated {:>6}  passed {:>6}  failed {:>4}  n/a {:>6}  worst slack {}",
                    b.label,
                    b.evaluated,
                    b.passed,
                    b.failed,
                    b.not_applicable,
                    b.worst_slack.map_or("-".to_string(), |s| format!("{s:.3e}"))
                );
            }
            if !report.violations.is_empty() {
                return Err(Failure::Violations(report.violations.len()));
            }
        }
        Command::RangePlot { input, samples, svg } => {
            let a = input.load()?;
            let boundary = numerical_range_boundary(&a, samples)?;
            emit(out, &boundary_csv(&boundary))?;
            if let Some(path) = svg {
                let spectrum = general_eig(&a).map(|e| e.values).unwrap_or_default();
                fs::write(path, boundary_svg(&boundary, &spectrum)).map_err(Error::from)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violations(n)) => {
            eprintln!("{n} violation(s)");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
