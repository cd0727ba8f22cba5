use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use randers_cli::{execute, load_config, CliError, Command, Format, Overrides};

/// Left-invariant Riemannian and Randers geometry on Lie groups.
///
/// Exit codes: 0 ok, 2 parse error, 3 invalid configuration,
/// 4 mathematical domain error, 5 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "randers", version)]
struct Args {
    /// Defaults to the config's `command` key.
    #[arg(value_enum)]
    command: Option<Command>,

    /// TOML analysis config.
    #[arg(long)]
    config: PathBuf,

    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    samples: Option<usize>,

    /// Initial geodesic velocity, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v0: Option<Vec<f64>>,

    /// Geodesic time horizon.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,

    /// Number of RK4 steps.
    #[arg(long)]
    steps: Option<usize>,

    /// Flagpole Y of a single plane or flag, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    flagpole: Option<Vec<f64>>,

    /// Second vector V spanning the plane with the flagpole.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    edge: Option<Vec<f64>>,

    /// Worker threads for sampling (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match try_main(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn try_main(args: Args) -> Result<(), CliError> {
    let mut config = load_config(&args.config)?;
    config.apply(Overrides {
        seed: args.seed,
        samples: args.samples,
        flagpole: args.flagpole,
        edge: args.edge,
        v0: args.v0,
        t: args.t,
        steps: args.steps,
        format: args.format,
        out: args.out,
        threads: args.threads,
    })?;
    let to_terminal = config.options.out.is_none() && std::io::stdout().is_terminal();
    let styled = to_terminal && std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty());
    let command = args
        .command
        .or(config.command)
        .ok_or_else(|| CliError::validation("no command: pass one or set `command` in the config"))?;
    let rendered = execute(&config, command, styled)?;
    match &config.options.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => std::io::stdout().lock().write_all(rendered.as_bytes())?,
    }
    Ok(())
}
