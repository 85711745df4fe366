//! The `vwave` command line.
//!
//! ```text
//! vwave simulate --config run.cfg
//! vwave dispersion --delta 0.1 --beta 0 --kmax 4
//! vwave apply --op hilbert|lambda:S|dx:N --in a.vwav --out b.vwav
//! vwave verify
//! ```
//!
//! Exit codes: 0 success, 1 other failure, 2 bad configuration or
//! arguments, 3 blow-up.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use log::{info, warn};

use crate::dispersion::{measure_dispersion, DispersionRow};
use crate::error::{Error, Result};
use crate::io::{build_initial_state, parse_config, read_snapshot, write_snapshot, FileSink};
use crate::model::{ModelParams, WaveState};
use crate::operators::{derivative, hilbert, lambda_pow};
use crate::spectral::SpectralField;
use crate::timestepper::simulate;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "vwave", version, about = "Viscous water-wave simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a simulation described by a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print analytic and measured linear eigenvalues as CSV.
    Dispersion {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        kmax: usize,
    },
    /// Apply an operator to both fields of a snapshot.
    Apply {
        /// `hilbert`, `lambda:S` or `dx:N`.
        #[arg(long)]
        op: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Run the built-in verification suite.
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Operator {
    Hilbert,
    Lambda(f64),
    Derivative(u32),
}

impl std::str::FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ConfigInvalid(format!("unknown operator `{s}`; expected hilbert, lambda:S or dx:N"));
        match s.split_once(':') {
            None if s == "hilbert" => Ok(Operator::Hilbert),
            Some(("lambda", v)) => v.parse().map(Operator::Lambda).map_err(|_| bad()),
            Some(("dx", v)) => v.parse().map(Operator::Derivative).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl Operator {
    pub fn apply(self, f: &SpectralField) -> Result<SpectralField> {
        match self {
            Operator::Hilbert => Ok(hilbert(f)),
            Operator::Lambda(s) => lambda_pow(f, s),
            Operator::Derivative(n) => Ok(derivative(f, n)),
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Regular output goes to `out`, messages to stderr.
pub fn run(args: &[String], out: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// [`run`] with output on stdout.
pub fn cli_main(args: &[String]) -> i32 {
    run(args, &mut std::io::stdout().lock())
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BlowUp { .. } => EXIT_BLOWUP,
        e if e.is_config_error() => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Simulate { config } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = parse_config(&text)?;
            let grid = cfg.grid()?;
            let params = cfg.params();
            let sim = cfg.sim_config(&grid);
            let init = build_initial_state(&cfg, &grid)?;
            info!(
                "N = {}, dt = {}, t_end = {}, {} steps, output in {}",
                grid.n(),
                sim.dt,
                sim.t_end,
                sim.step_count(0.0),
                cfg.output_dir.display()
            );
            let mut sink = FileSink::create(&cfg.output_dir)?;
            let report = simulate(&init, &params, &sim, &mut sink)?;
            sink.finish()?;
            if let Some(t) = report.energy_bound_exceeded_at {
                warn!("energy exceeded 4 E(0) first at t = {t}");
            }
            writeln!(
                out,
                "completed {} steps to t = {}; E(0) = {:e}, max E = {:e}",
                report.steps,
                report.state.t(),
                report.initial_energy,
                report.max_energy
            )?;
            Ok(EXIT_OK)
        }
        Command::Dispersion { delta, beta, kmax } => {
            let rows = measure_dispersion(&ModelParams::linear(delta, beta), kmax)?;
            writeln!(out, "{}", DispersionRow::csv_header())?;
            for row in rows {
                writeln!(out, "{}", row.csv_row())?;
            }
            Ok(EXIT_OK)
        }
        Command::Apply { op, input, output } => {
            let op: Operator = op.parse()?;
            let (state, params) = read_snapshot(&input)?;
            let next = WaveState::new(op.apply(state.f())?, op.apply(state.ft())?, state.t())?;
            write_snapshot(&next, &params, &output)?;
            Ok(EXIT_OK)
        }
        Command::Verify => {
            let outcomes = verify::run_all();
            for o in &outcomes {
                writeln!(out, "{o}")?;
            }
            let failed = outcomes.iter().filter(|o| !o.ok()).count();
            writeln!(out, "{} of {} checks failed", failed, outcomes.len())?;
            Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}
