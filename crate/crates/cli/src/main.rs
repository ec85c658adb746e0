//! `scalecalc`: scale derivatives, Euler–Lagrange checks and isoperimetric
//! verification from the command line.
//!
//! Exit codes: 0 success or confirmed, 1 negative verdict, 2 input error,
//! 3 inconclusive.

mod commands;
mod format;
mod problem;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::{ScaleDerivArgs, Status, SweepKind, Which, INPUT_ERROR};
use problem::{Numerics, ProblemFile};

#[derive(Debug, Parser)]
#[command(
    name = "scalecalc",
    version,
    about = "Scale calculus of variations for non-differentiable curves"
)]
struct Cli {
    /// Override a numerics value, e.g. `--numerics eps0=0.05`. Repeatable;
    /// applied after the problem file.
    #[arg(long = "numerics", value_name = "KEY=VALUE", global = true)]
    numerics: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the scale derivative of a curve on a grid as CSV (x, re, im).
    ScaleDeriv {
        file: Option<PathBuf>,
        /// Curve expression in x; overrides the file's [curve].
        #[arg(long)]
        curve: Option<String>,
        /// Scale; defaults to eps0.
        #[arg(long)]
        eps: Option<f64>,
        /// Comma-separated evaluation points, e.g. `--grid=-1,0,1`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Option<Vec<String>>,
    },
    /// Bracket the Euler–Lagrange residual of f or g along the curve.
    ElCheck {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "f")]
        lagrangian: Which,
        /// Also write the full residual sweep to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Verify that the curve is a constrained extremal.
    IsoCheck {
        file: PathBuf,
        /// Append a machine-readable key=value block.
        #[arg(long)]
        kv: bool,
    },
    /// Randomized check of the quantum Leibniz rule on polynomial pairs.
    LeibnizTest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// Emit a CSV table across the whole scale schedule.
    Sweep {
        file: PathBuf,
        #[arg(long, value_enum)]
        what: SweepKind,
        /// Lagrangian for residual sweeps.
        #[arg(long, value_enum, default_value = "f")]
        lagrangian: Which,
    },
    /// Print every numerics default.
    Defaults,
}

fn load(path: &Path, overrides: &[String]) -> Result<ProblemFile> {
    let mut p = ProblemFile::load(path)?;
    p.numerics.apply_overrides(overrides)?;
    p.numerics.validate()?;
    Ok(p)
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let mut defaults = Numerics::default();
    defaults.apply_overrides(&cli.numerics)?;
    defaults.validate()?;
    match cli.command {
        Command::ScaleDeriv {
            file,
            curve,
            eps,
            grid,
        } => {
            let problem = file.map(|f| load(&f, &cli.numerics)).transpose()?;
            commands::scale_deriv(
                ScaleDerivArgs {
                    problem: problem.as_ref(),
                    curve: curve.as_deref(),
                    eps,
                    grid: grid.as_deref(),
                },
                &defaults,
                out,
            )
        }
        Command::ElCheck {
            file,
            lagrangian,
            csv,
        } => commands::el_check(
            &load(&file, &cli.numerics)?,
            lagrangian,
            csv.as_deref(),
            out,
        ),
        Command::IsoCheck { file, kv } => {
            commands::iso_check(&load(&file, &cli.numerics)?, kv, out)
        }
        Command::LeibnizTest { seed, trials } => commands::leibniz_test(seed, trials, out, err),
        Command::Sweep {
            file,
            what,
            lagrangian,
        } => commands::sweep(&load(&file, &cli.numerics)?, what, lagrangian, out, err),
        Command::Defaults => {
            writeln!(out, "{defaults}")?;
            Ok(Status::Success)
        }
    }
}

/// A closed downstream pipe (`scalecalc sweep ... | head`) is not an error.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut err = io::stderr();
    let result = run(cli, &mut out, &mut err);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(status), Ok(())) => ExitCode::from(status as u8),
        (Err(e), _) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        (Err(e), _) => {
            let _ = writeln!(err, "error: {e:#}");
            ExitCode::from(INPUT_ERROR)
        }
        (_, Err(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        (_, Err(e)) => {
            let _ = writeln!(err, "error: writing output: {e}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
