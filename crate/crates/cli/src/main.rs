//! pvsusy: Painleve V solutions from supersymmetric partners of the radial
//! oscillator.
//!
//! Exit codes: 0 success, 1 residual or check failure, 2 invalid
//! configuration, 3 degenerate output.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{GridArgs, OutputArgs, SpecArgs};

#[derive(Debug, Parser)]
#[command(name = "pvsusy", version, about = "Painleve V solutions from SUSY partners of the radial oscillator")]
struct Cli {
    /// Flat key=value file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate w(z) on a grid and certify it by the PV residual.
    Solve {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Residual tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Write degenerate orderings (w = 0, 1, inf) instead of failing.
        #[arg(long)]
        allow_degenerate: bool,
    },
    /// Recompute a solution table: t0, t1, t2, params or all.
    Table {
        which: String,
        /// Restrict the w-row comparison to one l.
        #[arg(long = "l")]
        ell: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the operator-identity and special-function suites.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Run one check: intertwining, commutators, factorization, shift,
        /// number-operator, annihilation or special.
        #[arg(long)]
        check: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Detect the special-function hierarchy of a first-order spec and
    /// cross-check its closed forms.
    Hierarchy {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Partner potential V_k(x) on an x grid.
    GridPotential {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long = "x-min")]
        x_min: Option<f64>,
        #[arg(long = "x-max")]
        x_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = config::FileConfig::load(cli.config.as_deref()).and_then(|file| match &cli.command {
        Command::Solve { spec, grid, out, tol, allow_degenerate } => {
            commands::solve(&file, spec, grid, out, *tol, *allow_degenerate)
        }
        Command::Table { which, ell, out } => commands::table(&file, which, *ell, out),
        Command::Verify { spec, check, out, corrupt } => commands::verify(&file, spec, check.as_deref(), out, *corrupt),
        Command::Hierarchy { spec, out } => commands::hierarchy(&file, spec, out),
        Command::GridPotential { spec, x_min, x_max, points, out } => {
            commands::grid_potential(&file, spec, (*x_min, *x_max, *points), out)
        }
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("pvsusy: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
