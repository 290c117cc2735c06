use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod error;
mod negativity;
mod output;
mod slice;
mod spectrum;
mod sweep;
mod verify;

use config::{Flags, RunConfig};
use error::CliResult;

/// Zeeman effect of the 2D hydrogen atom in phase space.
#[derive(Debug, Parser)]
#[command(name = "zeeman", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// k0, delta, k1 and E for every level up to --max-level
    Spectrum(#[command(flatten)] Flags),
    /// Wigner function on a (q1, p1) grid at fixed (q2, p2)
    WignerSlice(#[command(flatten)] Flags),
    /// Negativity per level and field, beside the printed tables
    Negativity(#[command(flatten)] Flags),
    /// Runs every oracle comparison; exit 1 if an invariant fails
    Verify(#[command(flatten)] Flags),
    /// Slices and negativity tables over the B x E x order product
    Sweep(#[command(flatten)] Flags),
}

fn sweep_defaults() -> Flags {
    Flags {
        b: Some(vec![0.1, 0.5, 1.0]),
        e: Some(vec![1.0, 10.0]),
        order: Some(vec![0, 1]),
        ..Flags::default()
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Spectrum(f) => spectrum::run(&RunConfig::resolve("spectrum", f, Flags::default())?),
        Command::WignerSlice(f) => slice::run(&RunConfig::resolve("wigner-slice", f, Flags::default())?),
        Command::Negativity(f) => negativity::run(&RunConfig::resolve("negativity", f, Flags::default())?),
        Command::Verify(f) => verify::run(&RunConfig::resolve("verify", f, Flags::default())?),
        Command::Sweep(f) => sweep::run(&RunConfig::resolve("sweep", f, sweep_defaults())?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zeeman: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
