//! `sigmapi`: analyze, quadratize and solve σπ-ODEs from the command line.
//!
//! Exit codes: 0 success, 2 bad input (parse errors, invalid options),
//! 3 initial point or solution outside the domain, 4 numerical failure.

mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, Mode, RunConfig};
use error::CliError;
use output::{render, Metadata, Report};

#[derive(Parser)]
#[command(name = "sigmapi", version, about = "Exact quadratization and power-series solution of σπ-ODEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML file with default settings; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Start {
    /// Input file: `.spode` (σπ-ODE) or `.frame` (Driver-type frame).
    input: Option<PathBuf>,
    /// Initial time.
    #[arg(long, allow_negative_numbers = true)]
    t0: Option<f64>,
    /// Initial state, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x0: Option<Vec<f64>>,
    /// Series order K.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Domain, critical and singular coordinates, and the singular cascade.
    Analyze { input: Option<PathBuf> },
    /// Rewrite as a quadratic Driver-type system.
    Quadratize {
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// List coordinates equal to the original state first.
        #[arg(long)]
        identity_first: bool,
        /// Also write the frame to this file.
        #[arg(long)]
        frame_out: Option<PathBuf>,
    },
    /// Taylor coefficients at t0.
    Series {
        #[command(flatten)]
        start: Start,
        /// Components to report (1-based, comma separated); all by default.
        #[arg(long, value_delimiter = ',')]
        components: Option<Vec<usize>>,
    },
    /// Value at a target time by repeated re-expansion.
    Solve {
        #[command(flatten)]
        start: Start,
        /// Target time.
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        /// Fraction of the convergence bound taken per step.
        #[arg(long)]
        theta: Option<f64>,
        /// Give up after this many re-expansions.
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Compare the series with an RK4 reference solution.
    Check {
        #[command(flatten)]
        start: Start,
        /// Comparison window `a,b` containing t0.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        window: Option<Vec<f64>>,
        /// RK4 step.
        #[arg(long)]
        step: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Quadratize { .. } => "quadratize",
            Command::Series { .. } => "series",
            Command::Solve { .. } => "solve",
            Command::Check { .. } => "check",
        }
    }

    fn flags(&self) -> RunConfig {
        let from_start = |s: &Start| RunConfig {
            input: s.input.clone(),
            t0: s.t0,
            x0: s.x0.clone(),
            order: s.order,
            ..Default::default()
        };
        match self {
            Command::Analyze { input } => RunConfig { input: input.clone(), ..Default::default() },
            Command::Quadratize { input, mode, identity_first, .. } => RunConfig {
                input: input.clone(),
                mode: *mode,
                identity_first: identity_first.then_some(true),
                ..Default::default()
            },
            Command::Series { start, components } => RunConfig { components: components.clone(), ..from_start(start) },
            Command::Solve { start, to, theta, max_steps } => {
                RunConfig { to: *to, theta: *theta, max_steps: *max_steps, ..from_start(start) }
            }
            Command::Check { start, window, step } => {
                RunConfig { window: window.clone(), step: *step, ..from_start(start) }
            }
        }
    }
}

fn emit<R: Report>(cfg: &RunConfig, command: &str, report: &R) -> Result<(), CliError> {
    let input = cfg.input.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
    let metadata = Metadata::new(input)?;
    let text = render(command, &metadata, report, cfg.format());
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::input(format!("cannot write output: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let flags = RunConfig { format: cli.format, output: cli.output.clone(), ..cli.command.flags() };
    let cfg = file.overlay(flags);
    let name = cli.command.name();
    match &cli.command {
        Command::Analyze { .. } => emit(&cfg, name, &commands::analyze(&cfg)?),
        Command::Quadratize { frame_out, .. } => {
            let report = commands::quadratize(&cfg)?;
            if let Some(path) = frame_out {
                std::fs::write(path, report.frame_text())
                    .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
            }
            emit(&cfg, name, &report)
        }
        Command::Series { .. } => emit(&cfg, name, &commands::series(&cfg)?),
        Command::Solve { .. } => emit(&cfg, name, &commands::solve(&cfg)?),
        Command::Check { .. } => {
            let report = commands::check(&cfg)?;
            if report.warning() {
                eprintln!("warning: some samples lie outside the convergence bound of the series");
            }
            emit(&cfg, name, &report)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
