//! Command-line front end: evaluate, tabulate, verify, bound and scan the
//! squared sums. [`run`] is the whole program; `main` only forwards to it.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use sqsum::exact::rational::{as_integer, parse_rational};
use sqsum::{Error, FamilyId};

mod commands;
mod output;

/// Exit status for bad arguments.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for failed checks and runtime errors.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "sqsum",
    version,
    about = "Sums of squared fundamental functions of positive linear operators"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Evaluate S at one point by series, closed form and quadrature.
    Eval {
        #[command(flatten)]
        family: FamilyArgs,
        /// Evaluation point.
        #[arg(short = 'x', allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = sqsum::eval::DEFAULT_RTOL)]
        rtol: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Tabulate S over a grid by all three methods.
    Table {
        #[command(flatten)]
        family: FamilyArgs,
        /// Uniform grid `a:b:count`.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = sqsum::eval::DEFAULT_RTOL)]
        rtol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the exact identity checks of a family.
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        /// Check every index up to this one (named families).
        #[arg(long, default_value_t = 10)]
        n_max: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate the applicable upper bounds.
    Bounds {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(short = 'x', allow_negative_numbers = true, conflicts_with = "grid")]
        x: Option<f64>,
        /// Uniform grid `a:b:count`; defaults to the family's standard grid.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Scan a grid: ODE residual, convexity, log-convexity or monotonicity.
    Scan {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum)]
        kind: ScanArg,
        /// Uniform grid `a:b:count`.
        #[arg(long)]
        grid: Option<String>,
        /// Finite-difference step (ODE scans).
        #[arg(long = "h")]
        h: Option<f64>,
        /// Use the 3-point stencil instead of the 5-point one (ODE scans).
        #[arg(long)]
        three_point: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Describe a parameter choice.
    Info {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Clone, Args)]
struct FamilyArgs {
    #[arg(long, value_parser = ["bernstein", "szasz", "baskakov", "bbh", "mkz", "general"])]
    family: String,
    /// Family parameter, rational (general family only).
    #[arg(short = 'c', allow_hyphen_values = true)]
    c: Option<String>,
    /// Index, rational.
    #[arg(short = 'n')]
    n: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScanArg {
    Ode,
    Convexity,
    Logconvexity,
    Monotonicity,
}

impl FamilyArgs {
    fn family(&self) -> sqsum::Result<FamilyId> {
        let c = self.c.as_deref().map(parse_rational).transpose()?;
        FamilyId::parse(&self.family, c)
    }

    fn n(&self) -> sqsum::Result<BigRational> {
        let n = self
            .n
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("this command needs -n".into()))?;
        parse_rational(n)
    }

    fn n_natural(&self) -> sqsum::Result<u64> {
        let n = self.n()?;
        as_integer(&n)
            .filter(|&v| v >= 0)
            .map(|v| v as u64)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("-n must be a natural number here, got {n}"))
            })
    }
}

/// A uniform grid `a:b:count` with `count >= 2` and `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn parse(s: &str) -> sqsum::Result<Self> {
        let bad = |why: &str| Error::InvalidArgument(format!("grid {s:?}: {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, count] = parts[..] else {
            return Err(bad("expected a:b:count"));
        };
        let a: f64 = a.trim().parse().map_err(|_| bad("bad start"))?;
        let b: f64 = b.trim().parse().map_err(|_| bad("bad end"))?;
        let count: usize = count.trim().parse().map_err(|_| bad("bad count"))?;
        if count < 2 {
            return Err(bad("count must be at least 2"));
        }
        if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
            return Err(bad("endpoints must satisfy a < b"));
        }
        Ok(GridSpec { a, b, count })
    }

    pub fn points(&self) -> Vec<f64> {
        sqsum::grid::uniform(self.a, self.b, self.count)
    }
}

/// Runs the program on `argv` (including the program name), writing results
/// to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match commands::dispatch(cli.verb, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                commands::Failure::Usage(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}
