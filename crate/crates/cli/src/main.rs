//! Command-line surface: generate curve files, run residual checks and
//! classification, compute divisors and bundle degrees, export S⁴ meshes.
//!
//! Exit codes: 0 success/benign, 1 check failed, 2 usage/parse error,
//! 3 numeric error. Every error path prints a machine-readable
//! `{"error": {"kind": ..., "detail": ...}}` object.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use nkcp3::config::{OutputFormat, RunConfig};
use nkcp3::curve::{CurveExpr, Invariant, Verdict};
use nkcp3::divisor::{chern_degree, divisor_report, Bundle};
use nkcp3::error::Error;
use nkcp3::grid::{Chart, GridSpec};
use nkcp3::quat::HVec;
use nkcp3::ratfun::RatExpr;
use nkcp3::s4::surface_record;

#[derive(Parser)]
#[command(
    name = "nkcp3",
    about = "Pseudoholomorphic curves in the nearly Kähler CP³: generation, invariants, classification, divisors and S⁴ projection",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Residual tolerance for classification
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,
    /// Samples per grid side
    #[arg(long = "grid-n", global = true, default_value_t = 41)]
    grid_n: usize,
    /// Half-width of the sampling square
    #[arg(long = "grid-width", global = true, default_value_t = 1.5)]
    grid_width: f64,
    /// Step for finite-difference surface derivatives
    #[arg(long = "fd-step", global = true, default_value_t = 1e-3)]
    fd_step: f64,
    /// Charts to sample: 0, inf or both
    #[arg(long, global = true, default_value = "both")]
    charts: String,
    /// Worker threads for grid sweeps
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output format for reports
    #[arg(long, global = true, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a curve file from Weierstrass data, a fibre base point, or as
    /// the partner of an existing curve file
    Generate {
        /// Weierstrass numerator expression f
        #[arg(long)]
        f: Option<String>,
        /// Weierstrass expression g (nonconstant)
        #[arg(long)]
        g: Option<String>,
        /// Fibre base point, eight comma-separated reals re1,im1,...,re4,im4
        #[arg(long)]
        fiber: Option<String>,
        /// Wrap the curve from this file as a partner curve
        #[arg(long = "partner-of")]
        partner_of: Option<PathBuf>,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the residual sweep and classify the curve
    Check { file: PathBuf },
    /// Alias of check
    Classify { file: PathBuf },
    /// Locate the zeros of an invariant and report the divisor
    Divisors {
        file: PathBuf,
        /// Invariant: I1, I2 or II
        #[arg(long)]
        invariant: String,
        /// Screening threshold for grid minima of |invariant|
        #[arg(long = "zero-tol", default_value_t = 0.1)]
        zero_tol: f64,
    },
    /// Degree of the pullback of the dual tautological bundle
    Chern { file: PathBuf },
    /// Export the S⁴ projection mesh as CSV
    Project {
        file: PathBuf,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the partner-wrapped curve file
    Partner {
        file: PathBuf,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            // real usage error: structured object plus the rendered message
            let obj = json!({"error": {"kind": "usage", "detail": e.to_string()}});
            println!("{}", serde_json::to_string_pretty(&obj).unwrap());
            std::process::exit(2);
        }
        Err(e) => {
            // --help / --version; ignore early-closed pipes
            use std::io::Write;
            let _ = write!(std::io::stdout(), "{e}");
            std::process::exit(0);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            let kind = error_kind(&err);
            let obj = json!({"error": {"kind": kind, "detail": err.to_string()}});
            println!("{}", serde_json::to_string_pretty(&obj).unwrap());
            exit_code(&err)
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Error> {
    let config = build_config(&cli.run)?;
    config.validate()?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build_global()
        .ok();
    match cli.cmd {
        Cmd::Generate {
            f,
            g,
            fiber,
            partner_of,
            out,
        } => {
            // validate through the library, but keep the user's expression
            // text verbatim in the written file
            let body = match (f, g, fiber, partner_of) {
                (Some(f), Some(g), None, None) => {
                    let fe = RatExpr::parse(&f).map_err(Error::from)?;
                    let ge = RatExpr::parse(&g).map_err(Error::from)?;
                    CurveExpr::weierstrass(fe, ge)?;
                    json!({"kind": "weierstrass", "f": f, "g": g})
                }
                (None, None, Some(base), None) => {
                    let v = parse_base(&base)?;
                    CurveExpr::fiber(v)?;
                    json!({"kind": "fiber", "base": [
                        [v.c[0].re, v.c[0].im],
                        [v.c[1].re, v.c[1].im],
                        [v.c[2].re, v.c[2].im],
                        [v.c[3].re, v.c[3].im],
                    ]})
                }
                (None, None, None, Some(path)) => partner_wrap(&path)?,
                _ => {
                    return Err(Error::BadConfig(
                        "generate needs exactly one of --f/--g, --fiber, --partner-of".into(),
                    ))
                }
            };
            emit(&out, &serde_json::to_string_pretty(&body).unwrap())?;
            Ok(0)
        }
        Cmd::Check { file } | Cmd::Classify { file } => {
            let curve = read_curve(&file)?;
            let cls = curve.classify(&config.grid, config.tol)?;
            match config.output_format {
                OutputFormat::Json => {
                    let report = json!({
                        "classification": cls.verdict,
                        "max_ph_residual": cls.max_ph_residual,
                        "max_i1": cls.max_i1,
                        "max_i2": cls.max_i2,
                        "max_torsion": cls.max_torsion,
                        "evaluated": cls.evaluated,
                        "skipped": cls.skipped,
                        "grid": config.grid,
                        "config": config,
                    });
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                }
                OutputFormat::Csv => {
                    let verdict = serde_json::to_value(cls.verdict).unwrap();
                    println!("key,value");
                    println!("classification,{}", verdict.as_str().unwrap());
                    println!("max_ph_residual,{}", cls.max_ph_residual);
                    println!("max_i1,{}", cls.max_i1);
                    println!("max_i2,{}", cls.max_i2);
                    match cls.max_torsion {
                        Some(t) => println!("max_torsion,{t}"),
                        None => println!("max_torsion,"),
                    }
                    println!("evaluated,{}", cls.evaluated);
                    println!("skipped,{}", cls.skipped);
                }
            }
            Ok(if cls.verdict == Verdict::NotPseudoholomorphic {
                1
            } else {
                0
            })
        }
        Cmd::Divisors {
            file,
            invariant,
            zero_tol,
        } => {
            let curve = read_curve(&file)?;
            let invariant = match invariant.as_str() {
                "I1" | "i1" => Invariant::I1,
                "I2" | "i2" => Invariant::I2,
                "II" | "ii" => Invariant::II,
                other => {
                    return Err(Error::BadConfig(format!(
                        "unknown invariant {other}; expected I1, I2 or II"
                    )))
                }
            };
            let report = divisor_report(&curve, invariant, &config.grid, zero_tol)?;
            match config.output_format {
                OutputFormat::Json => {
                    let body = json!({
                        "invariant": report.invariant,
                        "zeros": report.zeros,
                        "total_order": report.total_order,
                        "config": config,
                    });
                    println!("{}", serde_json::to_string_pretty(&body).unwrap());
                }
                OutputFormat::Csv => {
                    println!("chart,z_re,z_im,order,residual");
                    for z in &report.zeros {
                        let chart = match z.chart {
                            Chart::Zero => "0",
                            Chart::Infinity => "inf",
                        };
                        println!(
                            "{chart},{},{},{},{}",
                            z.location.re, z.location.im, z.order, z.residual
                        );
                    }
                }
            }
            Ok(0)
        }
        Cmd::Chern { file } => {
            let curve = read_curve(&file)?;
            let (degree, drift) = chern_degree(&curve, Bundle::TautologicalDual, &config.grid)?;
            match config.output_format {
                OutputFormat::Json => {
                    let body = json!({
                        "degree": degree,
                        "drift": drift,
                        "config": config,
                    });
                    println!("{}", serde_json::to_string_pretty(&body).unwrap());
                }
                OutputFormat::Csv => {
                    println!("key,value");
                    println!("degree,{degree}");
                    println!("drift,{drift}");
                }
            }
            Ok(0)
        }
        Cmd::Project { file, out } => {
            let curve = read_curve(&file)?;
            let mut rows = String::new();
            rows.push_str("z_re,z_im,s0,s1,s2,s3,s4,E,F,G,conformal_residual,harmonic_residual\n");
            for chart in &config.grid.charts {
                for z in config.grid.points() {
                    match surface_record(&curve, *chart, z, config.fd_step) {
                        Ok(r) => rows.push_str(&format!(
                            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                            r.z_re,
                            r.z_im,
                            r.s0,
                            r.s1,
                            r.s2,
                            r.s3,
                            r.s4,
                            r.e,
                            r.f,
                            r.g,
                            r.conformal_residual,
                            r.harmonic_residual
                        )),
                        // poles, branch points and collapsed images are
                        // excluded from the mesh
                        Err(_) => continue,
                    }
                }
            }
            emit(&out, &rows)?;
            Ok(0)
        }
        Cmd::Partner { file, out } => {
            let body = partner_wrap(&file)?;
            emit(&out, &serde_json::to_string_pretty(&body).unwrap())?;
            Ok(0)
        }
    }
}

fn build_config(args: &RunArgs) -> Result<RunConfig, Error> {
    let charts = match args.charts.as_str() {
        "0" => vec![Chart::Zero],
        "inf" => vec![Chart::Infinity],
        "both" => vec![Chart::Zero, Chart::Infinity],
        other => {
            return Err(Error::BadConfig(format!(
                "unknown charts selector {other}; expected 0, inf or both"
            )))
        }
    };
    let output_format = match args.format.as_str() {
        "json" => OutputFormat::Json,
        "csv" => OutputFormat::Csv,
        other => {
            return Err(Error::BadConfig(format!(
                "unknown format {other}; expected json or csv"
            )))
        }
    };
    Ok(RunConfig {
        tol: args.tol,
        grid: GridSpec {
            half_width: args.grid_width,
            samples: args.grid_n,
            charts,
        },
        fd_step: args.fd_step,
        output_format,
        parallelism: args.jobs,
    })
}

fn parse_base(text: &str) -> Result<HVec, Error> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::BadConfig("fibre base must be eight comma-separated reals".into()))?;
    if parts.len() != 8 {
        return Err(Error::BadConfig(format!(
            "fibre base needs 8 reals, got {}",
            parts.len()
        )));
    }
    Ok(HVec::new(
        Complex64::new(parts[0], parts[1]),
        Complex64::new(parts[2], parts[3]),
        Complex64::new(parts[4], parts[5]),
        Complex64::new(parts[6], parts[7]),
    ))
}

fn read_curve(path: &PathBuf) -> Result<CurveExpr, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Io(format!("cannot parse curve file {}: {e}", path.display())))
}

/// Wrap the curve file as a partner curve, preserving the inner JSON
/// verbatim; nesting depth is validated through the library first.
fn partner_wrap(path: &PathBuf) -> Result<serde_json::Value, Error> {
    let inner = read_curve(path)?;
    CurveExpr::partner(inner)?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    let raw: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Io(format!("cannot parse curve file {}: {e}", path.display())))?;
    Ok(json!({"kind": "partner", "inner": raw}))
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::OrderOutOfRange(_) => "order_out_of_range",
        Error::PoleAtPoint(_) => "pole_at_point",
        Error::OrderExhausted => "order_exhausted",
        Error::Parse { .. } => "parse_error",
        Error::ZeroPolynomial => "zero_polynomial",
        Error::RootsDiverged => "roots_diverged",
        Error::NotAFlag(_) => "not_a_flag",
        Error::StepTooSmall(_) => "step_too_small",
        Error::StepTooLarge(_) => "step_too_large",
        Error::FrameNotOrthonormal(_) => "frame_not_orthonormal",
        Error::NoHorizontalTangent(_) => "no_horizontal_tangent",
        Error::DegenerateWeierstrass => "degenerate_weierstrass",
        Error::NonHolomorphicData => "non_holomorphic_data",
        Error::PartnerTooDeep => "partner_too_deep",
        Error::ZeroOnContour(_) => "zero_on_contour",
        Error::InsufficientSamples => "insufficient_samples",
        Error::QuadratureDrift(_) => "quadrature_drift",
        Error::IdenticallyZero => "identically_zero",
        Error::DegeneratePoint => "degenerate_point",
        Error::NotConformal(_) => "not_conformal",
        Error::EmptyGrid => "empty_grid",
        Error::BadConfig(_) => "bad_config",
        Error::Io(_) => "io_error",
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. }
        | Error::NonHolomorphicData
        | Error::DegenerateWeierstrass
        | Error::PartnerTooDeep
        | Error::BadConfig(_)
        | Error::Io(_) => 2,
        _ => 3,
    }
}
