mod commands;
mod config;
mod failure;
mod table;
mod verify;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::commands::{execute, Outcome};
use crate::config::{Cli, CliCommand, Command, Format, RunConfig};
use crate::failure::{Failure, EXIT_CHECK_FAILED, EXIT_OK};

#[derive(Serialize, Deserialize)]
struct ResultEnvelope {
    tool: String,
    version: String,
    config: RunConfig,
    payload: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    wall_time_s: Option<f64>,
}

fn render(cfg: &RunConfig, out: &Outcome, wall: f64) -> Result<String, Failure> {
    match cfg.format {
        Format::Csv => out
            .table
            .as_ref()
            .map(|t| t.to_csv())
            .ok_or_else(|| Failure::usage(format!("{} has no tabular output", cfg.command))),
        Format::Json => {
            let env = ResultEnvelope {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config: cfg.clone(),
                payload: out.payload.clone(),
                wall_time_s: cfg.timing.then_some(wall),
            };
            let mut s = serde_json::to_string_pretty(&env).map_err(|e| Failure::io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

fn run(cfg: RunConfig) -> Result<i32, Failure> {
    let start = Instant::now();
    let outcome = execute(&cfg)?;
    let text = render(&cfg, &outcome, start.elapsed().as_secs_f64())?;
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::io(format!("cannot write {path}: {e}")))?;
            println!("{path}");
            println!("{}", outcome.summary);
        }
        None => {
            print!("{text}");
            eprintln!("{}", outcome.summary);
        }
    }
    Ok(if outcome.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn replay(path: &Path) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    let env: ResultEnvelope =
        serde_json::from_str(&text).map_err(|e| Failure::io(format!("{}: not a result file: {e}", path.display())))?;
    env.config.validate()?;
    let outcome = execute(&env.config)?;
    if outcome.payload == env.payload {
        println!("replay of {} reproduced the payload", env.config.command);
        Ok(EXIT_OK)
    } else {
        println!("replay of {} produced a different payload", env.config.command);
        Ok(EXIT_CHECK_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match cli.command {
        CliCommand::Replay(o) => return exit(replay(Path::new(&o.path))),
        CliCommand::Gen(o) => (Command::Gen, o),
        CliCommand::Kernel(o) => (Command::Kernel, o),
        CliCommand::Verify(o) => (Command::Verify, o),
        CliCommand::Reconstruct(o) => (Command::Reconstruct, o),
        CliCommand::Delay(o) => (Command::Delay, o),
        CliCommand::Normalize(o) => (Command::Normalize, o),
        CliCommand::Sweep(o) => (Command::Sweep, o),
    };
    exit(RunConfig::from_opts(command, opts).and_then(run))
}

fn exit(result: Result<i32, Failure>) -> ExitCode {
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("hippo-lab: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
