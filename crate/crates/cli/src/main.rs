//! `glab`: experiments on amplitude-amplification search, counting and
//! query lower bounds.
//!
//! Every command writes JSON lines (default) or CSV records carrying a
//! `schema_version`. Exit status is 0 on success, 2 on usage errors and 3
//! when a run violates one of the invariants it checks.

mod commands;
mod record;
mod solutions;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use glab_core::counting::Regime;
use glab_core::GroverError;
use thiserror::Error;

use record::Format;
use solutions::SolutionSpec;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invariant failed: {0}")]
    Invariant(String),
    #[error(transparent)]
    Core(#[from] GroverError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(
                GroverError::InvalidShape(_)
                | GroverError::InvalidArgument(_)
                | GroverError::Undefined { .. }
                | GroverError::NotPowerOfTwo(..)
                | GroverError::IndexOutOfRange { .. },
            ) => 2,
            CliError::Invariant(_) | CliError::Core(_) => 3,
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "glab", version, about = "Grover search laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form amplitudes per iteration plus the optimal-iteration and
    /// optimal-stopping summary.
    Analyze(AnalyzeArgs),
    /// Seeded search trials with one of three strategies.
    Search(SearchArgs),
    /// Fourier-sampling estimates of the number of solutions.
    Count(CountArgs),
    /// Query lower bounds against Grover's 50%-success cost.
    Bounds(BoundsArgs),
    /// Runs the reproduction suite and prints a pass/fail table.
    ReproducePaper(ReproduceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed; trial i uses a seed derived from (seed, i).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record wall-clock time (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Table size; accepts `2^k`.
    #[arg(long, value_parser = parse_size)]
    pub n: u64,
    #[arg(long)]
    pub t: u64,
    #[arg(long, default_value_t = 0)]
    pub j_start: u64,
    /// Last iteration count shown (default: the optimal count).
    #[arg(long)]
    pub j_end: Option<u64>,
    /// Row spacing (default: at most 33 rows).
    #[arg(long)]
    pub j_step: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    /// `⌊π/4θ⌋` iterations with `t` known.
    Known,
    /// Measure at the expected-cost-optimal point and restart on failure.
    Restart,
    /// Growing random iteration counts, `t` unknown.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Collapsed,
    Statevector,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, value_parser = parse_size)]
    pub n: u64,
    /// `3,17,42`, `list:3,17`, `random:K`, `mod:K:R`, `none` or `all`.
    #[arg(long, conflicts_with = "t")]
    pub solutions: Option<SolutionSpec>,
    /// Shorthand for `--solutions random:T`.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, value_enum, default_value_t = Strategy::Unknown)]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = BackendKind::Collapsed)]
    pub backend: BackendKind,
    /// Attempts allowed to the restart strategy.
    #[arg(long, default_value_t = glab_core::search::Searcher::DEFAULT_MAX_RESTARTS)]
    pub max_restarts: u64,
    /// Unknown-t time-out in units of √N.
    #[arg(long)]
    pub timeout_factor: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CountArgs {
    #[arg(long, value_parser = parse_size)]
    pub n: u64,
    #[arg(long)]
    pub t: u64,
    #[arg(long, value_parser = parse_regime, default_value = "fixed")]
    pub regime: Regime,
    /// Regime constant (default 14 for `exact`, 1 otherwise).
    #[arg(long)]
    pub c: Option<f64>,
    /// Explicit sample length; only with the fixed regime.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Also write the frequency spectrum as CSV to this path.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    /// A size, a list `a,b,c`, or a doubling sweep `2^10..2^20`.
    #[arg(long, value_parser = parse_sizes)]
    pub n: Sizes,
    #[arg(long, default_value_t = 1)]
    pub t: u64,
    /// Also check the two supporting inequalities on this many random
    /// instances.
    #[arg(long)]
    pub trials: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    /// Comma-separated criterion ids (default: all).
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<u32>,
    #[command(flatten)]
    pub common: Common,
}

fn parse_size(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let value = match s.split_once('^') {
        Some((base, exp)) => {
            let base: u64 = base.parse().map_err(|_| format!("bad base in {s:?}"))?;
            let exp: u32 = exp.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            base.checked_pow(exp).ok_or_else(|| format!("{s} overflows"))?
        }
        None => s.parse().map_err(|_| format!("not a size: {s:?}"))?,
    };
    if value == 0 {
        return Err("N must be >= 1".into());
    }
    Ok(value)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<u64>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (parse_size(lo)?, parse_size(hi)?);
        if lo > hi {
            return Err(format!("empty sweep {s}"));
        }
        let mut out = Vec::new();
        let mut n = lo;
        while n <= hi {
            out.push(n);
            n = match n.checked_mul(2) {
                Some(next) => next,
                None => break,
            };
        }
        return Ok(Sizes(out));
    }
    s.split(',').map(parse_size).collect::<Result<_, _>>().map(Sizes)
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    s.parse().map_err(|e: GroverError| e.to_string())
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (report, common) = match &cli.command {
        Command::Analyze(a) => (commands::analyze(a)?, &a.common),
        Command::Search(a) => (commands::search(a)?, &a.common),
        Command::Count(a) => (commands::count(a)?, &a.common),
        Command::Bounds(a) => (commands::bounds(a)?, &a.common),
        Command::ReproducePaper(a) => (commands::reproduce(a)?, &a.common),
    };
    let text = match (common.format, &report.table) {
        (None, Some(table)) => table.clone(),
        (format, _) => record::render(&report.records, format.unwrap_or(Format::Json))?,
    };
    emit(&text, common.out.as_ref())?;
    if report.violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(report.violations.join("; ")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_size("2^20"), Ok(1 << 20));
        assert_eq!(parse_size("1000"), Ok(1000));
        assert!(parse_size("0").is_err());
        assert!(parse_size("2^70").is_err());
        assert_eq!(parse_sizes("2^2..2^4"), Ok(Sizes(vec![4, 8, 16])));
        assert_eq!(parse_sizes("3,5"), Ok(Sizes(vec![3, 5])));
        assert!(parse_sizes("8..4").is_err());
    }

    #[test]
    fn usage_errors_map_to_exit_2() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(GroverError::InvalidArgument("x".into())).exit_code(), 2);
        assert_eq!(CliError::Invariant("x".into()).exit_code(), 3);
        assert_eq!(CliError::Core(GroverError::Unnormalized(2.0)).exit_code(), 3);
    }
}
