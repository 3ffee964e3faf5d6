use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use phimin_cli::config::Command;
use phimin_cli::{configure_threads, parse_config, run, RunOptions, EXIT_ERROR};

/// Construct and audit surfaces that are minimal for a height-dependent weight.
#[derive(Parser, Debug)]
#[command(name = "phimin", version, about)]
struct Args {
    /// Pipeline to run; must match the `command` field of the configuration.
    #[arg(value_parser = command_name)]
    command: Command,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` of the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of randomized trial functions; overrides `seed` of the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Report progress on stderr.
    #[arg(long)]
    verbose: bool,
}

fn command_name(s: &str) -> Result<Command, String> {
    Command::from_cli_name(s).ok_or_else(|| {
        let names: Vec<String> = Command::ALL.iter().map(|c| c.cli_name()).collect();
        format!("unknown command {s:?}; expected one of {}", names.join(", "))
    })
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("phimin: {msg}");
    ExitCode::from(EXIT_ERROR as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_ERROR as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match configure_threads() {
        Ok(Some(n)) if args.verbose => eprintln!("[phimin] using {n} threads"),
        Ok(_) => {}
        Err(e) => return fail(format!("cli: {e}")),
    }
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail(format!("io: cannot read {}: {e}", args.config.display())),
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(format!("config: {e}")),
    };
    if cfg.command != args.command {
        return fail(format!(
            "cli: the command line names {} but the configuration names {}",
            args.command.cli_name(),
            cfg.command.cli_name()
        ));
    }
    let opts = RunOptions {
        out: args.out,
        seed: args.seed,
        verbose: args.verbose,
    };
    match run(&cfg, &opts) {
        Ok(outcome) => {
            for r in outcome.records.iter().filter(|r| !r.passed) {
                eprintln!("phimin: audit failed: {}", r.name);
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => fail(e),
    }
}
