//! The `rmkit` command line.
//!
//! Exit codes: 0 success, 1 an asserted verification check failed, 2 bad
//! arguments, a domain error or an unwritable output file.

pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::contfrac::{cf_expand, gl2_equivalent, stabilizer_matrix};
use crate::error::Error;
use crate::functor::functor_on_class;
use crate::lattices::{endomorphism_order, order_omega};
use crate::modgroup::{fixed_points, Matrix2Z};
use crate::quadnum::{Kind, QuadraticIrrational};

pub use verify::{parse_grid, run_verification, GridSpec, Target, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rmkit",
    version,
    about = "Exact quadratic irrationals, continued fractions and the CM-to-RM map"
)]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generator omega(D) of the maximal order.
    Omega {
        #[arg(long = "D", allow_hyphen_values = true)]
        d: BigInt,
        /// Use Q(sqrt(-D)).
        #[arg(long)]
        imaginary: bool,
    },
    /// Periodic continued fraction of theta.
    Cf {
        #[arg(long, allow_hyphen_values = true)]
        theta: QuadraticIrrational,
    },
    /// Endomorphism order (D, f) of the pseudo-lattice Z + Z theta.
    Order {
        #[arg(long, allow_hyphen_values = true)]
        theta: QuadraticIrrational,
    },
    /// Hyperbolic matrix in SL2(Z) fixing theta.
    Stabilizer {
        #[arg(long, allow_hyphen_values = true)]
        theta: QuadraticIrrational,
    },
    /// Fixed points of a hyperbolic matrix given as `a,b,c,d`.
    FixedPoints {
        #[arg(long, allow_hyphen_values = true)]
        matrix: Matrix2Z,
    },
    /// GL2(Z) equivalence of x and y, with a witness M such that M.y = x.
    Equivalent {
        #[arg(long, allow_hyphen_values = true)]
        x: QuadraticIrrational,
        #[arg(long, allow_hyphen_values = true)]
        y: QuadraticIrrational,
    },
    /// The CM-to-RM pipeline for the class (-D, f); prints the JSON report.
    Functor {
        #[arg(long = "D")]
        d: BigInt,
        #[arg(long)]
        f: BigInt,
        /// Box bound for the minimal-norm search.
        #[arg(long)]
        bound: Option<BigInt>,
    },
    /// Verify lemma1, lemma3, lemma4 or theorem1 over a grid.
    Verify(VerifyArgs),
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// lemma1, lemma3, lemma4 or theorem1.
    pub target: Target,
    #[arg(long = "D-max", default_value_t = 30)]
    pub d_max: u64,
    #[arg(long = "f-max", default_value_t = 3)]
    pub f_max: u64,
    #[arg(long = "k-max", default_value_t = 64)]
    pub k_max: u32,
    #[arg(long)]
    pub bound: Option<u64>,
    #[arg(long = "N-max", default_value_t = 15)]
    pub n_max: u32,
    /// Explicit points, e.g. "(2,1),(5,1)".
    #[arg(long)]
    pub grid: Option<String>,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a CSV table derived from the JSON report.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Worker threads; RMKIT_JOBS takes precedence. 0 means one per core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Re-parse the written report and re-verify every claim in it.
    #[arg(long)]
    pub recheck: bool,
}

impl VerifyArgs {
    pub fn grid_spec(&self) -> Result<GridSpec, Error> {
        let grid = GridSpec {
            d_max: self.d_max,
            f_max: self.f_max,
            k_max: self.k_max,
            bound: self.bound,
            n_max: self.n_max,
            points: self.grid.as_deref().map(parse_grid).transpose()?,
        };
        grid.validate()?;
        Ok(grid)
    }
}

/// What a command produced: text and JSON renderings plus an exit code.
struct Output {
    text: String,
    json: Value,
    code: i32,
}

impl Output {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Self {
            text: text.into(),
            json,
            code: EXIT_OK,
        }
    }
}

#[derive(Debug)]
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self(e.to_string())
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Omega { d, imaginary } => {
            let sign = if *imaginary {
                Kind::Imaginary
            } else {
                Kind::Real
            };
            let omega = order_omega(d, sign)?;
            Ok(Output::ok(
                omega.to_string(),
                json!({ "D": to_value(&crate::serde_int::Int(d.clone())), "sign": sign, "omega": omega }),
            ))
        }
        Command::Cf { theta } => {
            let cf = cf_expand(theta)?;
            let digits = |v: &[BigInt]| {
                v.iter()
                    .map(|x| to_value(&crate::serde_int::Int(x.clone())))
                    .collect::<Vec<_>>()
            };
            Ok(Output::ok(
                cf.to_string(),
                json!({
                    "theta": theta,
                    "cf": cf,
                    "preperiod": digits(cf.preperiod()),
                    "period": digits(cf.period()),
                }),
            ))
        }
        Command::Order { theta } => {
            let order = endomorphism_order(theta)?;
            Ok(Output::ok(order.to_string(), to_value(&order)))
        }
        Command::Stabilizer { theta } => {
            let m = stabilizer_matrix(theta)?;
            Ok(Output::ok(
                m.to_string(),
                json!({ "theta": theta, "matrix": m }),
            ))
        }
        Command::FixedPoints { matrix } => {
            let (x, xbar) = fixed_points(matrix)?;
            Ok(Output::ok(
                format!("{x}, {xbar}"),
                json!({ "matrix": matrix, "fixed_points": [x, xbar] }),
            ))
        }
        Command::Equivalent { x, y } => {
            let eq = gl2_equivalent(x, y)?;
            let text = match &eq.witness {
                Some(w) => format!("equivalent, witness {w}"),
                None => "not equivalent".to_string(),
            };
            Ok(Output::ok(text, to_value(&eq)))
        }
        Command::Functor { d, f, bound } => {
            let report = functor_on_class(d, f, bound.as_ref())?;
            let value = to_value(&report);
            Ok(Output::ok(pretty(&value), value))
        }
        Command::Verify(args) => run_verify(args),
    }
}

fn jobs(args: &VerifyArgs) -> Result<usize, Failure> {
    match std::env::var("RMKIT_JOBS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure(format!("RMKIT_JOBS={v:?} is not a thread count"))),
        Err(_) => Ok(args.jobs),
    }
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))
}

fn run_verify(args: &VerifyArgs) -> Result<Output, Failure> {
    let grid = args.grid_spec()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs(args)?)
        .build()
        .map_err(|e| Failure(e.to_string()))?;
    let report = pool.install(|| run_verification(args.target, &grid))?;
    let value = to_value(&report);
    let body = pretty(&value) + "\n";
    if let Some(path) = &args.out {
        write_file(path, &body)?;
    }
    if let Some(path) = &args.csv {
        write_file(path, &verify::csv_from_json(&value)?)?;
    }

    let mut code = if report.passes() {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    let mut recheck_line = String::new();
    if args.recheck {
        let text = match &args.out {
            Some(path) => fs::read_to_string(path)
                .map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?,
            None => body.clone(),
        };
        let outcome = serde_json::from_str::<VerificationReport>(&text)
            .map_err(|e| e.to_string())
            .and_then(|parsed| pool.install(|| parsed.recheck()));
        recheck_line = match outcome {
            Ok(()) => "\nrecheck: ok".to_string(),
            Err(e) => {
                code = EXIT_FAILED;
                format!("\nrecheck: FAILED: {e}")
            }
        };
    }

    let s = &report.summary;
    let mut text = format!(
        "{}: {} points, {} passed, {} failed, {} recorded, {} discrepancy-flagged ({} ms)",
        report.target,
        s.points,
        s.asserted_pass,
        s.asserted_fail,
        s.recorded,
        s.discrepancy_flagged,
        report.duration_ms
    );
    for p in report.points.iter().filter(|p| !p.passed) {
        let at = match (p.d, p.f, p.n) {
            (_, _, Some(n)) => format!("N={n}"),
            (Some(d), Some(f), _) => format!("D={d}, f={f}"),
            _ => String::new(),
        };
        text.push_str(&format!("\nFAIL {at}: {}", p.failures.join(", ")));
    }
    text.push_str(&recheck_line);
    Ok(Output {
        text,
        json: value,
        code,
    })
}

/// Parses `args` (including the program name), runs the command, prints the
/// result and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return EXIT_OK;
        }
        Err(e) => {
            let rendered = e.to_string();
            let line = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("{}", line.trim());
            return EXIT_ERROR;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let printed = if cli.json {
                serde_json::to_string(&out.json).expect("json")
            } else {
                out.text
            };
            let _ = writeln!(stdout, "{printed}");
            out.code
        }
        Err(Failure(msg)) => {
            eprintln!("error: {}", msg.lines().next().unwrap_or_default());
            EXIT_ERROR
        }
    }
}
