//! Command-line interface. Every run that writes `--out` also writes
//! `<out>.manifest.json` with the full configuration, budgets, version and
//! elapsed time.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid arguments or input,
//! 3 budget exceeded.

mod commands;

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::Budget;
use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "rtprof",
    version,
    about = "Poincaré and separation profiles of round-tree graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutChoice {
    Auto,
    Exact,
    Heuristic,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build the round tree RT^{H,V} truncated at a depth.
    RtBuild(RtBuildArgs),
    /// Check a graph against the round-tree axioms.
    RtValidate(RtValidateArgs),
    /// Build the witness subgraph Y_k.
    YkBuild(YkBuildArgs),
    /// Build the combinatorial half-plane RT^{H,1}.
    HalfPlane(HalfPlaneArgs),
    /// Numeric upper bound on h^p by seeded restarts.
    Hp(HpArgs),
    /// Two-valued upper bound on h^1 (exact below 21 vertices).
    H1(PoincareArgs),
    /// Exact h^2 from the Laplacian spectral gap.
    H2(PoincareArgs),
    /// Congestion loads and the path-counting lower bound.
    Congestion(CongestionArgs),
    /// Certified profile points for Y_k over a range of k.
    Sweep(SweepArgs),
    /// Power-law fit of a sweep CSV.
    Fit(FitArgs),
    /// ε-cut of a graph.
    Cut(CutArgs),
    /// ε-cut sizes of round trees over a range of depths.
    SepScan(SepScanArgs),
    /// Ball measures and the Ahlfors constant of a Cantor space.
    CantorCheck(CantorArgs),
    /// Discrete cone over a Cantor space.
    ConeBuild(ConeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct RtBuildArgs {
    #[arg(long = "H")]
    pub h: usize,
    #[arg(long = "V")]
    pub v: usize,
    #[arg(long)]
    pub depth: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: GraphFormat,
}

#[derive(Debug, Args, Serialize)]
pub struct RtValidateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long = "H")]
    pub h: Option<usize>,
    #[arg(long = "V")]
    pub v: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct YkBuildArgs {
    #[arg(long = "H")]
    pub h: usize,
    #[arg(long = "V")]
    pub v: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: GraphFormat,
}

#[derive(Debug, Args, Serialize)]
pub struct HalfPlaneArgs {
    #[arg(long = "H")]
    pub h: usize,
    #[arg(long)]
    pub depth: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: GraphFormat,
}

#[derive(Debug, Args, Serialize)]
pub struct PoincareArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// JSON result record.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Witness function as `vertex,value` CSV.
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct HpArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: PoincareArgs,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct CongestionArgs {
    /// Graph routed along breadth-first trees; omit to route Y_k.
    #[arg(long = "in", conflicts_with_all = ["h", "v", "k"])]
    pub input: Option<PathBuf>,
    #[arg(long = "H")]
    pub h: Option<usize>,
    #[arg(long = "V")]
    pub v: Option<usize>,
    /// Exponent for the bound (and for building Y_k unless --build-p is given).
    #[arg(long)]
    pub p: f64,
    /// Exponent used to size Y_k, when it differs from --p.
    #[arg(long)]
    pub build_p: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-edge loads as `u,v,m_e` CSV.
    #[arg(long)]
    pub loads: Option<PathBuf>,
    /// Estimate loads from this many random pairs; the result is not certified.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long = "H")]
    pub h: usize,
    #[arg(long = "V")]
    pub v: usize,
    #[arg(long)]
    pub p: f64,
    /// Inclusive range `a..b`, or a single value.
    #[arg(long, value_parser = parse_range)]
    #[serde(serialize_with = "ser_range")]
    pub k: RangeInclusive<usize>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also compute numeric upper estimates.
    #[arg(long)]
    pub upper: bool,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CutArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "2/3")]
    pub epsilon: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: CutChoice,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SepScanArgs {
    #[arg(long = "H")]
    pub h: usize,
    #[arg(long = "V", default_value_t = 1)]
    pub v: usize,
    /// Inclusive range `a..b`, or a single value.
    #[arg(long, value_parser = parse_range)]
    #[serde(serialize_with = "ser_range")]
    pub depth: RangeInclusive<usize>,
    #[arg(long, default_value = "2/3")]
    pub epsilon: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CantorArgs {
    #[arg(long = "H")]
    pub h: usize,
    #[arg(long = "V")]
    pub v: usize,
    #[arg(long)]
    pub depth: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConeArgs {
    #[arg(long = "H")]
    pub h: usize,
    #[arg(long = "V")]
    pub v: usize,
    #[arg(long)]
    pub depth: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: GraphFormat,
}

/// Parses `a..b` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad integer {t:?}: {e}"))
    };
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(a..=b)
        }
        None => {
            let a = num(s)?;
            Ok(a..=a)
        }
    }
}

fn ser_range<S: serde::Serializer>(
    r: &RangeInclusive<usize>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}..{}", r.start(), r.end()))
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::RtBuild(_) => "rt-build",
            Command::RtValidate(_) => "rt-validate",
            Command::YkBuild(_) => "yk-build",
            Command::HalfPlane(_) => "half-plane",
            Command::Hp(_) => "hp",
            Command::H1(_) => "h1",
            Command::H2(_) => "h2",
            Command::Congestion(_) => "congestion",
            Command::Sweep(_) => "sweep",
            Command::Fit(_) => "fit",
            Command::Cut(_) => "cut",
            Command::SepScan(_) => "sep-scan",
            Command::CantorCheck(_) => "cantor-check",
            Command::ConeBuild(_) => "cone-build",
        }
    }

    /// Primary output path, beside which the manifest goes.
    pub fn out(&self) -> Option<&Path> {
        match self {
            Command::RtBuild(a) => Some(&a.out),
            Command::RtValidate(a) => a.out.as_deref(),
            Command::YkBuild(a) => Some(&a.out),
            Command::HalfPlane(a) => Some(&a.out),
            Command::Hp(a) => a.common.out.as_deref(),
            Command::H1(a) | Command::H2(a) => a.out.as_deref(),
            Command::Congestion(a) => a.out.as_deref(),
            Command::Sweep(a) => Some(&a.out),
            Command::Fit(a) => a.out.as_deref(),
            Command::Cut(a) => a.out.as_deref(),
            Command::SepScan(a) => Some(&a.out),
            Command::CantorCheck(a) => a.out.as_deref(),
            Command::ConeBuild(a) => Some(&a.out),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Hp(a) => Some(a.seed),
            Command::Congestion(a) => a.sample.map(|_| a.seed),
            Command::Sweep(a) => a.upper.then_some(a.seed),
            _ => None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub budget: Budget,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
    pub status: &'static str,
    pub error: Option<String>,
    pub elapsed: f64,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } => EXIT_BUDGET,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let argv: Vec<String> = args.into_iter().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let budget = match Budget::from_env() {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let start = Instant::now();
    let mut outputs = Vec::new();
    let result = commands::dispatch(&cli.command, &budget, &mut outputs);
    let code = match &result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e)
        }
    };
    if let Some(out) = cli.command.out() {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: cli.command.name(),
            argv: argv.iter().skip(1).cloned().collect(),
            config: serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null),
            budget,
            seed: cli.command.seed(),
            outputs: outputs
                .iter()
                .map(|p: &PathBuf| p.display().to_string())
                .collect(),
            status: match code {
                EXIT_OK => "ok",
                EXIT_BUDGET => "budget_exceeded",
                EXIT_IO => "io_error",
                _ => "invalid",
            },
            error: result.as_ref().err().map(|e| e.to_string()),
            elapsed: start.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        if let Err(e) = std::fs::write(manifest_path(out), text) {
            eprintln!("error: writing manifest: {e}");
            return if code == EXIT_OK { EXIT_IO } else { code };
        }
    }
    code
}
