//! `cusp`: drives the series pipeline from a TOML run configuration.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cusp_core::ScalarKind;

use crate::commands::Run;
use crate::config::Config;

#[derive(Parser)]
#[command(name = "cusp", version, about = "Cusp singularities of hodograph-linearised gas dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Arithmetic; overrides `mode` in the config.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// Potential B, the hodograph map and its Jacobian, with the low-order relation checklist.
    Expand(Common),
    /// Normal-form pack: h(τ,V), V(W), λ1, λ2, U(τ,W) and W(τ,U).
    Normalform(Common),
    /// All sheets through the listed (t, x) points.
    Solve(Common),
    /// Fold and zero-level curves at the listed τ.
    Curves(Common),
    /// Finite-difference residuals of the reconstructed solution.
    Verify(Common),
    /// Convergence probes of the G series and bidisc checks.
    Korobeinik(Common),
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, error::CliError> {
    let (common, action): (Common, fn(&mut Run) -> error::CliResult<()>) = match cli.command {
        Command::Expand(c) => (c, commands::expand),
        Command::Normalform(c) => (c, commands::normalform),
        Command::Solve(c) => (c, commands::solve),
        Command::Curves(c) => (c, commands::curves),
        Command::Verify(c) => (c, commands::verify),
        Command::Korobeinik(c) => (c, commands::korobeinik),
    };
    let cfg = Config::load(&common.config)?;
    let mode = common.mode.map(|m| match m {
        Mode::Exact => ScalarKind::Exact,
        Mode::Float => ScalarKind::Float,
    });
    let mut run = Run::new(cfg, mode, common.out)?;
    action(&mut run)?;
    Ok(run.out.written)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
