//! `tsd`: batch front end for the two-pulse Rydberg CNOT simulator.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::SweepAxis;
use config::{apply_overrides, known_presets, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or usage; exits with status 2.
    Usage(String),
    /// A requested solution does not exist; exits with status 3.
    NoSolution(String),
    /// Everything else; exits with status 1.
    Runtime(String),
}

impl From<tsd_core::Error> for CliError {
    fn from(e: tsd_core::Error) -> Self {
        match e {
            tsd_core::Error::InvalidArgument(m) => CliError::Usage(m),
            tsd_core::Error::NoSolution(m) => CliError::NoSolution(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "tsd",
    about = "Deterministic simulator of the two-pulse transition-slow-down Rydberg CNOT",
    after_help = "Frequencies in configuration files are given divided by 2*pi (MHz/GHz keys).\n\
                  Trailing arguments of the form key=value override configuration entries."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Configuration file (flat key=value with [section] headers).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset applied before the configuration file.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trailing key=value overrides.
    #[arg(trailing_var_arg = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the CNOT sequence; write the realized map and error summary.
    Cnot {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write per-input population traces.
        #[arg(long)]
        traces: bool,
    },
    /// Prepare the Bell state from (|00> + |10>)/sqrt(2).
    Bell {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sweep one ensemble axis and emit a CSV table.
    Sweep {
        /// temperature | interaction | sigma | tau
        #[arg(long)]
        axis: SweepAxis,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Solve the AC-Stark compensation conditions.
    Stark {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Two-state slow-down demonstration.
    DemoTwoState {
        /// Control-to-target Rabi ratio (default sqrt(15)).
        #[arg(long)]
        alpha: Option<f64>,
        /// Intended joint Rabi cycles during the control pulse.
        #[arg(long, default_value_t = 2)]
        cycles: u32,
    },
    /// Run the invariant suite.
    Check,
    /// List the known presets.
    Presets,
}

fn build_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(preset) = &common.preset {
        cfg.apply_preset(preset)?;
    }
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    apply_overrides(&mut cfg, &common.overrides)?;
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    configure_workers(&cfg);
    Ok(cfg)
}

/// Worker-count priority: TSD_WORKERS environment variable, then the
/// `workers` configuration key, then rayon's default.
fn configure_workers(cfg: &RunConfig) {
    let from_env = std::env::var("TSD_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0);
    let n = from_env.or(if cfg.workers > 0 { Some(cfg.workers) } else { None });
    if let Some(n) = n {
        // ignore failure: the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Cnot { common, traces } => {
            let mut cfg = build_config(&common)?;
            cfg.traces = cfg.traces || traces;
            commands::cmd_cnot(&cfg)
        }
        Command::Bell { common } => commands::cmd_bell(&build_config(&common)?),
        Command::Sweep { axis, common } => commands::cmd_sweep(&build_config(&common)?, axis),
        Command::Stark { common } => commands::cmd_stark(&build_config(&common)?),
        Command::DemoTwoState { alpha, cycles } => {
            commands::cmd_demo_two_state(alpha.unwrap_or(15.0_f64.sqrt()), cycles)
        }
        Command::Check => commands::cmd_check(),
        Command::Presets => {
            for p in known_presets() {
                println!("{p}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::NoSolution(msg)) => {
            eprintln!("no solution: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
