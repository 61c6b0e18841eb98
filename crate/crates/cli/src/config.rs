use std::fmt;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hippo_core::experiments::{SweepTask, DEFAULT_CUTOFF};
use hippo_core::{DiscMethod, Method};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Parser, Debug)]
#[command(name = "hippo-lab", version, about = "Build, discretize and probe HiPPO state space models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Write the (A, B, C, D) matrices of a system as JSON.
    Gen(Opts),
    /// Sample continuous kernels e^{tA}B or the discrete kernel C Ā^k B̄.
    Kernel(Opts),
    /// Run the verification suites; exits 1 if any check fails.
    Verify(Opts),
    /// Reconstruct input history from the final state.
    Reconstruct(Opts),
    /// Delay-network kernel and lagged-signal RMSE.
    Delay(Opts),
    /// Track the state norm under constant input.
    Normalize(Opts),
    /// Sweep the step size over a log grid.
    Sweep(Opts),
    /// Re-run the config echoed in a JSON result and compare payloads.
    Replay(ReplayOpts),
}

#[derive(Args, Debug)]
pub struct ReplayOpts {
    /// JSON result file written by an earlier run.
    pub path: String,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[arg(short = 'N', long = "state-size", default_value_t = 64)]
    pub state_size: usize,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub dt_min: Option<f64>,
    #[arg(long)]
    pub dt_max: Option<f64>,
    /// Grid points of a sweep.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub len: Option<usize>,
    #[arg(long, value_parser = parse_disc, default_value = "bilinear")]
    pub disc: DiscMethod,
    /// Use the halved matrices on a window of length 2.
    #[arg(long)]
    pub normalized: bool,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// One-column CSV input signal.
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long, value_enum, default_value_t = KernelMode::Continuous)]
    pub mode: KernelMode,
    /// Attach the delay readout before generating or sampling.
    #[arg(long)]
    pub delay_readout: bool,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Corrupt one entry of A before verifying.
    #[arg(long)]
    pub fuzz: bool,
    #[arg(long, value_parser = parse_task, default_value = "delay")]
    pub task: SweepTask,
    /// Dependency length in samples for sweeps.
    #[arg(long, default_value_t = 1000)]
    pub lag: usize,
    /// Constant input level for normalize.
    #[arg(long, default_value_t = 1.0)]
    pub level: f64,
    /// Band edge of synthesized noise as a fraction of Nyquist.
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: f64,
    /// Record wall time in the result; output is then no longer reproducible.
    #[arg(long)]
    pub timing: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: hippo_core::Error| e.to_string())
}

fn parse_disc(s: &str) -> Result<DiscMethod, String> {
    s.parse().map_err(|e: hippo_core::Error| e.to_string())
}

fn parse_task(s: &str) -> Result<SweepTask, String> {
    s.parse().map_err(|e: hippo_core::Error| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KernelMode {
    Continuous,
    Discrete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Matrix,
    Gram,
    Closure,
    Dt,
    Pade,
    Kernel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Gen,
    Kernel,
    Verify,
    Reconstruct,
    Delay,
    Normalize,
    Sweep,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Gen => "gen",
            Command::Kernel => "kernel",
            Command::Verify => "verify",
            Command::Reconstruct => "reconstruct",
            Command::Delay => "delay",
            Command::Normalize => "normalize",
            Command::Sweep => "sweep",
        })
    }
}

/// Fully resolved settings of one run; echoed into every JSON result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub method: Method,
    pub state_size: usize,
    pub dt: f64,
    pub dt_min: Option<f64>,
    pub dt_max: Option<f64>,
    pub count: usize,
    pub seed: u64,
    pub len: usize,
    pub disc: DiscMethod,
    pub normalized: bool,
    pub out: Option<String>,
    pub format: Format,
    pub input: Option<String>,
    pub mode: KernelMode,
    pub delay_readout: bool,
    pub suite: Suite,
    pub fuzz: bool,
    pub task: SweepTask,
    pub lag: usize,
    pub level: f64,
    pub cutoff: f64,
    pub timing: bool,
}

impl RunConfig {
    pub fn from_opts(command: Command, o: Opts) -> Result<Self, Failure> {
        let (dt, len) = match command {
            Command::Reconstruct => (1e-3, 10_000),
            Command::Normalize => (1e-3, 10_000),
            Command::Delay | Command::Sweep => (1e-2, 4000),
            _ => (1e-2, 1000),
        };
        let format = o.format.unwrap_or(match command {
            Command::Kernel | Command::Sweep => Format::Csv,
            _ => Format::Json,
        });
        let cfg = RunConfig {
            command,
            method: o.method,
            state_size: o.state_size,
            dt: o.dt.unwrap_or(dt),
            dt_min: o.dt_min,
            dt_max: o.dt_max,
            count: o.count,
            seed: o.seed,
            len: o.len.unwrap_or(len),
            disc: o.disc,
            normalized: o.normalized,
            out: o.out,
            format,
            input: o.input,
            mode: o.mode,
            delay_readout: o.delay_readout,
            suite: o.suite,
            fuzz: o.fuzz,
            task: o.task,
            lag: o.lag,
            level: o.level,
            cutoff: o.cutoff,
            timing: o.timing,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if self.state_size == 0 {
            return Err(Failure::usage("state size N must be at least 1"));
        }
        if self.len == 0 || self.count == 0 || self.lag == 0 {
            return Err(Failure::usage("--len, --count and --lag must be at least 1"));
        }
        for (name, v) in [("--dt", Some(self.dt)), ("--dt-min", self.dt_min), ("--dt-max", self.dt_max)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Failure::usage(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if let (Some(lo), Some(hi)) = (self.dt_min, self.dt_max) {
            if lo > hi {
                return Err(Failure::usage(format!("--dt-min {lo} exceeds --dt-max {hi}")));
            }
        }
        if !self.level.is_finite() {
            return Err(Failure::usage("--level must be finite"));
        }
        if !(self.cutoff > 0.0 && self.cutoff <= 1.0) {
            return Err(Failure::usage(format!("--cutoff must lie in (0, 1], got {}", self.cutoff)));
        }
        Ok(())
    }
}
