//! `memflow` command-line tool.
//!
//! Tables go to stdout (or `--out`), diagnostics to stderr. The exit status
//! reports whether the tool ran, not the physics: an unphysical regime is
//! data, not an error.

mod args;
mod commands;
mod sweep;
mod table;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};
use memflow::analysis::ClassifyOptions;
use memflow::flow::{MeasureOptions, SigmaMethod};
use memflow::{EquationKind, QubitState, StatePair};

use args::{parse_bloch, GridArgs, OutputArgs, ParamArgs};
use commands::OracleMethod;
use table::emit;

#[derive(Debug, Parser)]
#[command(name = "memflow", version, about = "Memory-kernel qubit dynamics: maps, rates, backflow and divisibility")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum MethodArg {
    Analytic,
    FiniteDifference,
}

impl From<MethodArg> for SigmaMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Analytic => SigmaMethod::AnalyticSigma,
            MethodArg::FiniteDifference => SigmaMethod::FiniteDifferenceSigma,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decay profile xi and its derivative on a time grid.
    Xi {
        #[arg(long, value_parser = |s: &str| s.parse::<EquationKind>().map_err(|e| e.to_string()))]
        kind: EquationKind,
        #[arg(long)]
        r: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Closed-form evolution of one initial state.
    Solve {
        #[command(flatten)]
        params: ParamArgs,
        /// Initial Bloch vector x,y,z.
        #[arg(long, value_parser = parse_bloch, default_value = "0,0,1")]
        state: QubitState<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Trace distance between two states given as Bloch vectors.
    TraceDistance {
        #[arg(long, value_parser = parse_bloch, allow_hyphen_values = true)]
        rho1: QubitState<f64>,
        #[arg(long, value_parser = parse_bloch, allow_hyphen_values = true)]
        rho2: QubitState<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Distance path and its rate of change for a pair of states.
    Sigma {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_parser = parse_bloch, default_value = "0,0,1", allow_hyphen_values = true)]
        rho1: QubitState<f64>,
        #[arg(long, value_parser = parse_bloch, default_value = "0,0,-1", allow_hyphen_values = true)]
        rho2: QubitState<f64>,
        #[arg(long, default_value_t = 20.0)]
        tau_end: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Non-Markovianity measure: largest total distance gain over pairs.
    Measure {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 20.0)]
        tau_end: f64,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 2001)]
        grid_points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Rates of the equivalent time-local equation.
    TclRates {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Choi spectrum of the map on a time grid.
    Choi {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Most negative Choi eigenvalue over intermediate maps.
    Divisibility {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 20.0)]
        tau_end: f64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Largest output Bloch norm over pure inputs on a time grid.
    Positivity {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Numerical solution of the integro-differential equation compared with
    /// the closed form.
    Oracle {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_parser = parse_bloch, default_value = "0,0,1", allow_hyphen_values = true)]
        state: QubitState<f64>,
        #[arg(long, default_value_t = 10.0)]
        tau_end: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = OracleMethod::Augmented)]
        method: OracleMethod,
        /// Quadrature steps; a multiple of points - 1.
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Parameter sweep from a TOML or JSON configuration.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "sweep-out")]
        out: PathBuf,
    },
    /// Regime verdict combining positivity, CP, divisibility and the measure.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 20.0)]
        tau_end: f64,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 200)]
        divisibility_grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Xi { kind, r, grid, out } => commands::write(&commands::xi(kind, r, &grid)?, &out),
        Command::Solve { params, state, grid, out } => commands::write(&commands::solve(&params, &state, &grid)?, &out),
        Command::TraceDistance { rho1, rho2, out } => commands::write(&commands::trace_distance_table(&rho1, &rho2)?, &out),
        Command::Sigma { params, rho1, rho2, tau_end, points, method, out } => {
            let grid = GridArgs { tau_end, points };
            commands::write(&commands::sigma(&params, &StatePair::new(rho1, rho2), &grid, method.into())?, &out)
        }
        Command::Measure { params, tau_end, budget, grid_points, seed, method, out } => {
            let opts = MeasureOptions {
                tau_end,
                budget,
                grid_points,
                seed,
                method: method.into(),
            };
            commands::write(&commands::measure(&params, &opts)?, &out)
        }
        Command::TclRates { params, grid, out } => commands::write(&commands::tcl_rates(&params, &grid)?, &out),
        Command::Choi { params, grid, tol, out } => commands::write(&commands::choi(&params, &grid, tol)?, &out),
        Command::Divisibility { params, tau_end, grid, tol, out } => {
            commands::write(&commands::divisibility(&params, tau_end, grid, tol)?, &out)
        }
        Command::Positivity { params, grid, samples, out } => {
            commands::write(&commands::positivity(&params, &grid, samples)?, &out)
        }
        Command::Oracle { params, state, tau_end, points, tol, method, steps, out } => {
            commands::write(&commands::oracle(&params, &state, tau_end, points, tol, method, steps)?, &out)
        }
        Command::Sweep { config, out } => {
            let cfg = sweep::SweepConfig::load(&config)?;
            let record = sweep::run(cfg, &out)?;
            eprintln!(
                "{} points in {:.3}s, {} failures; outputs in {}",
                record.points.len(),
                record.wall_time_s,
                record.failures.len(),
                out.display()
            );
            for f in &record.failures {
                eprintln!("  {f}");
            }
            Ok(())
        }
        Command::Classify { params, tau_end, budget, divisibility_grid, seed, out } => {
            let opts = ClassifyOptions {
                tau_end,
                measure_budget: budget,
                divisibility_grid,
                seed,
                ..ClassifyOptions::default()
            };
            emit(&commands::classify_cmd(&params, &opts, out.format)?, out.out.as_deref())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
