//! `fdnet`: batch front end for the fdnet-core analyses.
//!
//! Every subcommand writes a CSV table (to `--out`, or standard output) and,
//! with `--out`, a `<name>.manifest.json` next to it holding the resolved
//! configuration. Passing that manifest back through `--config` repeats the
//! run.

mod commands;
mod config;
mod output;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BandwidthFlags, CapacityFlags, DmtFlags, GdofFlags, OutageFlags};
use validate::ValidateFlags;

/// Why a run stopped. Usage problems exit with 2, everything else with 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(anyhow::Error),
}

impl From<fdnet::Error> for Failure {
    fn from(e: fdnet::Error) -> Self {
        use fdnet::Error::*;
        match e {
            InvalidConfig(_) | InvalidArgument(_) | OutOfScope(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.into()),
        }
    }
}

#[derive(Parser)]
#[command(name = "fdnet", version, about = "Capacity, GDoF and DMT analysis of a side-channel assisted full-duplex network")]
struct Cli {
    /// Worker threads for sweeps and Monte Carlo (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Io {
    /// CSV output path; a manifest is written next to it
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config or manifest; flags given on the command line take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// DMT curve from the exponent LP, with the closed form where one exists
    Dmt {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        flags: DmtFlags,
    },
    /// GDoF regions with and without CSIT
    Gdof {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        flags: GdofFlags,
    },
    /// Rate-region bounds averaged over Rayleigh realizations
    Capacity {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        flags: CapacityFlags,
    },
    /// Monte Carlo outage probability and fitted diversity order
    Outage {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        flags: OutageFlags,
    },
    /// Side-channel bandwidth requirements
    Bandwidth {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        flags: BandwidthFlags,
    },
    /// Cross-check LP solutions against every closed form and print a table
    Validate {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        flags: ValidateFlags,
    },
}

fn run(cmd: Command) -> Result<bool, Failure> {
    use config::resolve;
    match cmd {
        Command::Dmt { io, flags } => {
            commands::dmt(resolve("dmt", &flags, io.config.as_deref())?)?.emit(io.out.as_deref())?
        }
        Command::Gdof { io, flags } => {
            commands::gdof(resolve("gdof", &flags, io.config.as_deref())?)?.emit(io.out.as_deref())?
        }
        Command::Capacity { io, flags } => {
            commands::capacity(resolve("capacity", &flags, io.config.as_deref())?)?.emit(io.out.as_deref())?
        }
        Command::Outage { io, flags } => {
            commands::outage(resolve("outage", &flags, io.config.as_deref())?)?.emit(io.out.as_deref())?
        }
        Command::Bandwidth { io, flags } => {
            commands::bandwidth(resolve("bandwidth", &flags, io.config.as_deref())?)?.emit(io.out.as_deref())?
        }
        Command::Validate { io, flags } => {
            let (run, ok) = validate::validate(resolve("validate", &flags, io.config.as_deref())?)?;
            print!("{}", validate::render(&run.table));
            if io.out.is_some() {
                run.emit(io.out.as_deref())?;
            }
            println!("{}", if ok { "all checks passed" } else { "some checks FAILED" });
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help and version land here too, with exit code 0
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
