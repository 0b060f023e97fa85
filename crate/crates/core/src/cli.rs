//! The `coxgrowth` command-line front end.
//!
//! Exit codes: 0 success, 2 I/O failure, 3 invalid input, 4 element cap
//! reached, 5 a verified check failed, 6 series and enumeration disagree.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::classify::{classify, spherical_subsets};
use crate::element::{Ball, EngineError, DEFAULT_CAP};
use crate::geometry::{Geometry, GeometryError};
use crate::matrix::CoxeterMatrix;
use crate::report::{rational_string, VerificationReport};
use crate::series::{
    corroborate, finiteness_verdict, parse_rational, rational_growth_series, taylor_coefficients, SeriesError,
    DEFAULT_SAMPLE,
};
use crate::stats::{self, compute_k, compute_stats, Gate, SphereStats, StatsError};

pub const EXIT_IO: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 5;
pub const EXIT_DISAGREEMENT: i32 = 6;

/// Every check `verify` knows, in the order it runs them.
pub const SUITE: [&str; 10] = [
    "L32", "L33", "L34", "L35", "L45", "k-ratio", "P29", "C210", "L211", "L24",
];

#[derive(Debug, Parser)]
#[command(
    name = "coxgrowth",
    version,
    about = "Growth functions and sphere statistics of Coxeter systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank, diagram properties and spherical subsets.
    Info(Common),
    /// Export the ball as JSON lines.
    Ball(Common),
    /// Sphere sizes c_i and single-descent counts d_i.
    Stats(Common),
    /// Run counting and geometry checks.
    Verify(VerifyArgs),
    /// Rational growth series and convergence verdicts.
    Series(SeriesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Matrix file: {"rank": n, "m": [[...]]} or {"rank": n, "uniform": m}.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Ball radius; defaults to 12, 10 or 8 for rank <= 3, 4 or >= 5.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Maximum number of elements to enumerate.
    #[arg(long, default_value_t = DEFAULT_CAP, value_parser = positive)]
    pub cap: usize,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn positive(text: &str) -> Result<usize, String> {
    match text.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated checks; defaults to all of them.
    #[arg(long, value_delimiter = ',')]
    pub suite: Option<Vec<String>>,
    /// Run checks outside their hypotheses and report counterexamples without failing.
    #[arg(long)]
    pub no_hypothesis_gate: bool,
    /// Chamber radius for the geometry checks; defaults to min(depth, 8, 6 or 4 for rank <= 3, 4 or >= 5).
    #[arg(long)]
    pub geometry_depth: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub common: Common,
    /// Evaluation points P/Q[,P/Q...]; defaults to 1/(n-1) and 1/(n-2).
    #[arg(long, value_delimiter = ',')]
    pub eval: Option<Vec<String>>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    ResourceLimit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::ResourceLimit(_) => EXIT_RESOURCE,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::ResourceLimit { .. } => CliError::ResourceLimit(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Engine(inner) => inner.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Info(c) => cmd_info(&c),
        Command::Ball(c) => cmd_ball(&c),
        Command::Stats(c) => cmd_stats(&c),
        Command::Verify(v) => cmd_verify(&v),
        Command::Series(s) => cmd_series(&s),
    }
}

pub fn load_matrix(path: &Path) -> Result<CoxeterMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    CoxeterMatrix::from_json_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

pub fn default_depth(rank: usize) -> usize {
    match rank {
        0..=3 => 12,
        4 => 10,
        _ => 8,
    }
}

/// Keeps the ambient ball of radius `2r + 2` used by the geometry checks at desk scale.
pub fn default_geometry_depth(rank: usize, depth: usize) -> usize {
    let cap = match rank {
        0..=3 => 8,
        4 => 6,
        _ => 4,
    };
    depth.min(cap)
}

fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn setup(common: &Common) -> Result<(CoxeterMatrix, usize), CliError> {
    let matrix = load_matrix(&common.matrix)?;
    let depth = common.depth.unwrap_or_else(|| default_depth(matrix.rank()));
    Ok((matrix, depth))
}

pub fn cmd_info(common: &Common) -> Result<i32, CliError> {
    let matrix = load_matrix(&common.matrix)?;
    let subsets = spherical_subsets(&matrix);
    let records: Vec<_> = subsets.iter().map(|j| j.record()).collect();
    let all: Vec<usize> = (0..matrix.rank()).collect();
    let label = classify(&matrix, &all);
    let text = match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut by_size = vec![0usize; matrix.rank() + 1];
            for j in &subsets {
                by_size[j.generators.len()] += 1;
            }
            pretty(&serde_json::json!({
                "rank": matrix.rank(),
                "matrix": matrix.to_json(),
                "diagram": matrix.diagram_properties(),
                "finite": label.is_finite(),
                "type": label.description(),
                "order": label.order().map(|o| o.to_string()),
                "spherical_subsets": records,
                "spherical_subsets_by_size": by_size,
            }))
        }
        Format::Csv => {
            let mut out = String::from("generators,family,description,order\n");
            for r in &records {
                let gens: Vec<String> = r.generators.iter().map(|g| g.to_string()).collect();
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    gens.join(" "),
                    r.family,
                    r.description,
                    r.order
                ));
            }
            out
        }
    };
    emit(common, &text)?;
    Ok(0)
}

pub fn cmd_ball(common: &Common) -> Result<i32, CliError> {
    let (matrix, depth) = setup(common)?;
    let ball = Ball::build(&matrix, depth, common.cap)?;
    let mut buf = Vec::new();
    ball.write_jsonl(&mut buf).expect("writing to memory");
    emit(common, &String::from_utf8(buf).expect("ascii output"))?;
    Ok(0)
}

fn build_stats(matrix: &CoxeterMatrix, depth: usize, cap: usize) -> Result<SphereStats, CliError> {
    Ok(compute_stats(&Ball::build(matrix, depth, cap)?))
}

pub fn cmd_stats(common: &Common) -> Result<i32, CliError> {
    let (matrix, depth) = setup(common)?;
    let stats = build_stats(&matrix, depth, common.cap)?;
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => stats.to_csv(),
        Format::Json => pretty(&stats.to_json()),
    };
    emit(common, &text)?;
    Ok(0)
}

/// Outcome of one named check within `verify`.
#[derive(Debug)]
pub enum CheckOutcome {
    Ran(VerificationReport),
    Skipped(String),
}

fn stats_outcome(r: Result<VerificationReport, StatsError>) -> CheckOutcome {
    match r {
        Ok(report) => CheckOutcome::Ran(report),
        Err(StatsError::RangeEmpty { .. }) => CheckOutcome::Skipped("skipped (range empty)".into()),
        Err(e) => CheckOutcome::Skipped(format!("skipped (hypothesis): {e}")),
    }
}

fn geometry_outcome(r: Result<VerificationReport, GeometryError>) -> Result<CheckOutcome, CliError> {
    match r {
        Ok(report) => Ok(CheckOutcome::Ran(report)),
        Err(GeometryError::HypothesisViolated(e)) => Ok(CheckOutcome::Skipped(format!("skipped (hypothesis): {e}"))),
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let common = &args.common;
    let (matrix, depth) = setup(common)?;
    let suite: Vec<String> = match &args.suite {
        Some(list) => list
            .iter()
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
        None => SUITE.iter().map(|s| s.to_string()).collect(),
    };
    if let Some(bad) = suite.iter().find(|s| !SUITE.contains(&s.as_str())) {
        return Err(CliError::Invalid(format!(
            "unknown check {bad:?}; known: {}",
            SUITE.join(",")
        )));
    }
    let gate = if args.no_hypothesis_gate {
        Gate::Diagnostic
    } else {
        Gate::Enforced
    };
    let stats = build_stats(&matrix, depth, common.cap)?;
    let geo_depth = args
        .geometry_depth
        .unwrap_or_else(|| default_geometry_depth(matrix.rank(), depth));
    let needs_geometry = suite
        .iter()
        .any(|s| matches!(s.as_str(), "P29" | "C210" | "L211" | "L24"));
    let geometry = if needs_geometry {
        Some(Geometry::new(&matrix, geo_depth, common.cap)?)
    } else {
        None
    };

    let mut results = Vec::new();
    let mut failed = false;
    let mut summary = String::new();
    for name in SUITE.iter().filter(|n| suite.iter().any(|s| s == *n)) {
        let outcome = match *name {
            "L32" => stats_outcome(stats::verify_l32(&stats, gate)),
            "L33" => stats_outcome(stats::verify_l33(&stats, gate)),
            "L34" => stats_outcome(stats::verify_l34(&stats, gate)),
            "L35" => stats_outcome(stats::verify_l35(&stats, gate)),
            "L45" => stats_outcome(stats::verify_l45(&stats, gate)),
            "k-ratio" => match stats.m.map(|m| compute_k(stats.n, m)) {
                Some(Ok(k)) => stats_outcome(stats::verify_descent_ratio(&stats, &k, gate)),
                Some(Err(e)) => CheckOutcome::Skipped(format!("skipped (hypothesis): {e}")),
                None => CheckOutcome::Skipped("skipped (hypothesis): requires a uniform label".into()),
            },
            geo => {
                let g = geometry.as_ref().expect("built above");
                geometry_outcome(match geo {
                    "P29" => g.verify_p29(gate),
                    "C210" => g.verify_c210(gate),
                    "L211" => g.verify_l211(gate),
                    _ => g.verify_l24(gate),
                })?
            }
        };
        match outcome {
            CheckOutcome::Ran(report) => {
                failed |= !report.holds();
                summary.push_str(&format!("{report}\n"));
                results.push(serde_json::json!({
                    "check": name,
                    "status": if report.holds() { "holds" } else { "fails" },
                    "report": report.to_json(),
                }));
            }
            CheckOutcome::Skipped(reason) => {
                summary.push_str(&format!("{name}: {reason}\n"));
                results.push(serde_json::json!({ "check": name, "status": "skipped", "reason": reason }));
            }
        }
    }
    let doc = serde_json::json!({
        "matrix": matrix.to_json(),
        "depth": depth,
        "geometry_depth": geometry.as_ref().map(|g| g.radius()),
        "gate": if gate == Gate::Enforced { "enforced" } else { "diagnostic" },
        "all_hold": !failed,
        "results": results,
    });
    emit(common, &pretty(&doc))?;
    eprint!("{summary}");
    Ok(verify_exit_code(failed, gate))
}

/// Failures only count against the exit status when hypotheses are enforced.
pub fn verify_exit_code(failed: bool, gate: Gate) -> i32 {
    if failed && gate == Gate::Enforced {
        EXIT_CHECK_FAILED
    } else {
        0
    }
}

/// `1/(n-1)` and, when `n >= 3`, `1/(n-2)`.
pub fn default_points(rank: usize) -> Vec<BigRational> {
    (1..=2)
        .filter(|&k| rank > k)
        .map(|k| BigRational::new(1.into(), BigInt::from(rank - k)))
        .collect()
}

pub fn cmd_series(args: &SeriesArgs) -> Result<i32, CliError> {
    let common = &args.common;
    let (matrix, depth) = setup(common)?;
    let points = match &args.eval {
        Some(list) => list
            .iter()
            .map(|p| match parse_rational(p) {
                Some(q) if q > BigRational::zero() => Ok(q),
                _ => Err(CliError::Invalid(format!(
                    "evaluation point {p:?} is not a positive rational P/Q"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => default_points(matrix.rank()),
    };
    let f = rational_growth_series(&matrix)?;
    let coeffs = taylor_coefficients(&f, depth)?;
    let stats = build_stats(&matrix, depth, common.cap)?;
    let enumerated: Vec<BigInt> = stats.c.iter().map(|&c| BigInt::from(c)).collect();
    let agree = coeffs == enumerated;

    let mut verdicts = Vec::new();
    for t in &points {
        let mut v = finiteness_verdict(&f, t, DEFAULT_SAMPLE.max(depth))?;
        let q = t.denom().clone();
        if t.numer() == &BigInt::from(1) {
            if let Ok(q) = usize::try_from(q) {
                v.quotient = corroborate(&stats, t, q);
            }
        }
        verdicts.push(v.to_json());
    }
    let mut series = f.to_json(&coeffs);
    series["display"] = format!("({}) / ({})", f.numerator(), f.denominator()).into();
    let doc = serde_json::json!({
        "matrix": matrix.to_json(),
        "depth": depth,
        "series": series,
        "enumerated": stats.c,
        "coefficients_agree": agree,
        "points": points.iter().map(rational_string).collect::<Vec<_>>(),
        "verdicts": verdicts,
    });
    emit(common, &pretty(&doc))?;
    if !agree {
        eprintln!("error: series coefficients disagree with enumeration");
        return Ok(EXIT_DISAGREEMENT);
    }
    Ok(0)
}
