//! The `oddsci` command line.
//!
//! Exit codes: 0 success, 1 usage or IO error, 2 input out of domain,
//! 3 numerical failure, 4 standard interval undefined on a zero cell.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use oddsci_core::{
    exact_ci_with, extended_or, minimal_sample_size, standard_ci, ConfidenceLevel, Grid, Method,
    TwoArmCounts,
};

use crate::render::{self, Format, IntervalReport};
use crate::{coverage_curve_par, SharedModel};

#[derive(Debug, Parser)]
#[command(
    name = "oddsci",
    version,
    about = "Exact and standard confidence intervals for the odds ratio"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format; `coverage` defaults to csv, everything else to text.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct TableArgs {
    /// Size of group A.
    #[arg(long)]
    pub na: u32,
    /// Size of group B.
    #[arg(long)]
    pub nb: u32,
    /// Successes in group A.
    #[arg(long)]
    pub xa: u32,
    /// Successes in group B.
    #[arg(long)]
    pub xb: u32,
    /// Confidence level in (0, 1).
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Standard,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Standard => Method::Standard,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact interval for an observed table.
    Exact(TableArgs),
    /// Standard (Wald) interval for an observed table.
    Standard(TableArgs),
    /// Distribution of the sample odds ratio at a true odds ratio.
    Dist {
        #[arg(long)]
        na: u32,
        #[arg(long)]
        nb: u32,
        /// True odds ratio.
        #[arg(long)]
        r: f64,
    },
    /// Coverage probability over a grid of true odds ratios.
    Coverage {
        #[arg(long)]
        na: u32,
        #[arg(long)]
        nb: u32,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, value_enum, default_value = "exact")]
        method: MethodArg,
        #[arg(long, default_value_t = 0.05)]
        rmin: f64,
        #[arg(long, default_value_t = 2.0)]
        rmax: f64,
        #[arg(long, default_value_t = 40)]
        points: usize,
        /// Space grid points evenly in log r.
        #[arg(long)]
        log: bool,
    },
    /// Smallest group-A size whose intervals are two-sided.
    Minsize {
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] oddsci_core::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Core(e) if e.is_numeric() => 3,
            CliError::Core(oddsci_core::Error::StandardUndefined(_)) => 4,
            CliError::Core(_) => 2,
        }
    }
}

fn report(args: &TableArgs, method: Method) -> Result<IntervalReport, CliError> {
    let level = ConfidenceLevel::new(args.level)?;
    let counts = TwoArmCounts::new(args.na, args.nb, args.xa, args.xb)?;
    let interval = match method {
        Method::Exact => exact_ci_with(&SharedModel::new(args.na, args.nb)?, &counts, level)?,
        Method::Standard => standard_ci(&counts, level)?,
    };
    Ok(IntervalReport {
        method,
        interval,
        level,
        or_hat: extended_or(&counts),
        n_a: args.na,
        n_b: args.nb,
    })
}

/// Executes a parsed command and returns the rendered output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let format = cli.format;
    let text = |default: Format| format.unwrap_or(default);
    match &cli.command {
        Command::Exact(args) => Ok(report(args, Method::Exact)?.render(text(Format::Text))),
        Command::Standard(args) => Ok(report(args, Method::Standard)?.render(text(Format::Text))),
        Command::Dist { na, nb, r } => {
            let dist = oddsci_core::Model::new(*na, *nb)?.compute(*r)?;
            Ok(render::distribution(&dist, text(Format::Text)))
        }
        Command::Coverage {
            na,
            nb,
            level,
            method,
            rmin,
            rmax,
            points,
            log,
        } => {
            let level = ConfidenceLevel::new(*level)?;
            let (min, max, points) = (*rmin, *rmax, *points);
            let grid = if *log {
                Grid::Log { min, max, points }
            } else {
                Grid::Linear { min, max, points }
            };
            let model = SharedModel::new(*na, *nb)?;
            let curve = coverage_curve_par(&model, (*method).into(), level, &grid)?;
            Ok(render::curve(&curve, text(Format::Csv)))
        }
        Command::Minsize { level } => {
            let level = ConfidenceLevel::new(*level)?;
            Ok(render::minimal_size(
                level,
                minimal_sample_size(level),
                text(Format::Text),
            ))
        }
    }
}

/// Parses `args`, runs the command, writes the output and returns the exit
/// code. Help and version requests exit with 0.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = run(&cli).and_then(|out| match &cli.out {
        Some(path) => std::fs::write(path, out).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
