//! `fidelis` command-line front end.

mod classifier_arg;
mod commands;
mod output;
mod theory_cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fidelis::Error;
use serde::{Deserialize, Serialize};

use commands::{BridgeCheckArgs, FidelityArgs, GenerateArgs, SweepArgs};
use theory_cmd::TheoryCommand;

#[derive(Parser, Debug)]
#[command(name = "fidelis", version, about = "Distribution-robust fidelity for subgraph explanations")]
struct Cli {
    /// Worker threads for parallel fan-out. Outputs do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Write a synthetic dataset as JSONL.
    Generate(GenerateArgs),
    /// Score explanations with the classical, sampled or exact estimator.
    Fidelity(FidelityArgs),
    /// Run the β-grid perturbation protocol.
    Sweep(SweepArgs),
    /// Exact and simulated checks of the theoretical claims.
    #[command(subcommand)]
    Theory(TheoryCommand),
    /// Handshake with a classifier and classify a few graphs.
    BridgeCheck(BridgeCheckArgs),
    /// Rerun the invocation recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(clap::Args, Debug, Clone, Default)]
pub struct ReplayArgs {
    /// A manifest.json written by an earlier run.
    manifest: PathBuf,
    /// Where to write outputs; the recorded invocation has no output path.
    #[arg(long)]
    out: PathBuf,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) => 2,
        Error::Data(_) | Error::Io(_) | Error::Json(_) => 3,
        Error::Bridge(_) => 4,
        Error::Domain(_) | Error::TooLarge(_) | Error::UndefinedCorrelation(_) | Error::UndefinedAuc(_) => 5,
    }
}

pub fn run(command: Command) -> fidelis::Result<()> {
    match command {
        Command::Generate(a) => commands::generate(a),
        Command::Fidelity(a) => commands::fidelity(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Theory(t) => theory_cmd::run(t),
        Command::BridgeCheck(a) => commands::bridge_check(a),
        Command::Replay(a) => {
            let mut cmd = output::read_manifest(&a.manifest)?;
            cmd.set_out(a.out);
            run(cmd)
        }
    }
}

impl Command {
    fn set_out(&mut self, out: PathBuf) {
        match self {
            Command::Generate(a) => a.out = out,
            Command::Fidelity(a) => a.out = out,
            Command::Sweep(a) => a.out = out,
            Command::Theory(t) => t.set_out(out),
            Command::BridgeCheck(_) | Command::Replay(_) => {}
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.workers {
        Some(0) => Err(Error::InvalidArgument("--workers must be at least 1".into())),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
            .and_then(|pool| pool.install(|| run(cli.command))),
        None => run(cli.command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
