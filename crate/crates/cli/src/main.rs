use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use torsion_cli::config::{ConfigError, RunConfig};
use torsion_cli::{run, Command, Scope, WORKERS_ENV};

/// Exact verification sweeps for non-symmetric connections.
///
/// Exit status: 0 when every check passes, 1 when any check fails,
/// 2 for a rejected config or bad arguments, 3 for I/O failures.
#[derive(Parser, Debug)]
#[command(name = "torsion", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Relations among the derivative kinds, kind ranks and double derivatives.
    VerifyDerivatives(Common),
    /// Ricci-type identities.
    VerifyRicci {
        #[arg(long, value_enum, default_value = "catalogue")]
        scope: Scope,
        #[command(flatten)]
        common: Common,
    },
    /// Ranks inside the curvature family.
    RankRho(Common),
    /// Cosmology metric tables; needs a `cosmology` block in the config.
    Cosmology(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here (overrides the config `output`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report on stdout instead of the text summary.
    #[arg(long)]
    json: bool,
    /// Record wall time per check; reports are then no longer reproducible.
    #[arg(long)]
    timings: bool,
}

fn configure_workers() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var(WORKERS_ENV) else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| ConfigError(format!("{WORKERS_ENV}: expected a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(format!("{WORKERS_ENV}: {e}")))
}

fn execute(cli: Cli) -> Result<bool> {
    configure_workers()?;
    let (cmd, common) = match cli.cmd {
        Cmd::VerifyDerivatives(c) => (Command::VerifyDerivatives, c),
        Cmd::VerifyRicci { scope, common } => (Command::VerifyRicci(scope), common),
        Cmd::RankRho(c) => (Command::RankRho, c),
        Cmd::Cosmology(c) => (Command::Cosmology, c),
    };
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    let report = run(cmd, &cfg, common.timings)?;
    let json = report.to_json();
    if let Some(path) = common.out.as_ref().or(cfg.output.as_ref()) {
        std::fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?;
    }
    if common.json {
        print!("{json}");
    } else {
        print!("{}", report.to_text());
    }
    Ok(report.ok())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<ConfigError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
