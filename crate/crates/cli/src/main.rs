//! `dimlab`: build sequences, profile them, and run the transducer and wtt experiments.

mod artifacts;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{CommandKind, ExperimentConfig, Overrides};

#[derive(Debug, Parser)]
#[command(name = "dimlab", version, about = "Finite-horizon dimension experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Write the first `horizon` bits of a constructed sequence.
    Construct(Common),
    /// Tabulate dim_H, dim_p, dim_si and dim_is over a family.
    Profile(Common),
    /// Run the switching transducer on two tracks.
    Transduce(Common),
    /// Apply a wtt machine to a constructed oracle.
    Wtt(Common),
    /// Enumerate the toy prefix machine and tabulate exact complexities.
    Exactk(Common),
    /// Rerun a manifest; the artifacts come out byte-identical.
    Replay {
        manifest: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for every source the config leaves unspecified.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<u64>,
    /// identity, ceiling, compressor or exact.
    #[arg(long)]
    estimator: Option<String>,
    /// Family manifest file.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    window_nmin: Option<u64>,
    #[arg(long)]
    stages: Option<u64>,
}

fn execute(cli: Cli) -> Result<Option<String>> {
    let (cfg, out) = match cli.command {
        Cmd::Replay { manifest, out } => {
            let cfg = ExperimentConfig::load(&manifest)?;
            let kind = cfg.command.context("manifest names no command")?;
            (cfg.resolve(kind, &Overrides::default())?, out)
        }
        Cmd::Construct(c) => resolve(CommandKind::Construct, c)?,
        Cmd::Profile(c) => resolve(CommandKind::Profile, c)?,
        Cmd::Transduce(c) => resolve(CommandKind::Transduce, c)?,
        Cmd::Wtt(c) => resolve(CommandKind::Wtt, c)?,
        Cmd::Exactk(c) => resolve(CommandKind::Exactk, c)?,
    };
    let outcome = commands::run(&cfg)?;
    let names: Vec<String> = outcome.bundle.names().map(String::from).collect();
    outcome.bundle.write(&out)?;
    eprintln!("wrote {} to {}", names.join(", "), out.display());
    Ok(outcome.partial)
}

fn resolve(kind: CommandKind, c: Common) -> Result<(ExperimentConfig, PathBuf)> {
    let cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let o = Overrides {
        seed: c.seed,
        horizon: c.horizon,
        estimator: c.estimator,
        family: c.family,
        window_nmin: c.window_nmin,
        stages: c.stages,
    };
    Ok((cfg.resolve(kind, &o)?, c.out))
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(partial)) => {
            eprintln!("error: artifacts are marked partial: {partial}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
