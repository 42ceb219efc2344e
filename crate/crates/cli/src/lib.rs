//! Batch front end: config ingestion, seeded sweeps and JSON reports.

pub mod commands;
pub mod config;
pub mod report;

use anyhow::Result;

use crate::config::RunConfig;
use crate::report::Report;

/// Worker count for the sweeps; unset means one per core.
pub const WORKERS_ENV: &str = "TORSION_WORKERS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Scope {
    /// The seventeen catalogued identities plus expanded and bracket forms.
    Catalogue,
    /// Solve and verify all 81 combinations.
    All,
    /// Mixed-kind family with rational weights.
    Mixed,
}

impl Scope {
    pub fn name(self) -> &'static str {
        match self {
            Scope::Catalogue => "catalogue",
            Scope::All => "all",
            Scope::Mixed => "mixed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    VerifyDerivatives,
    VerifyRicci(Scope),
    RankRho,
    Cosmology,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyDerivatives => "verify-derivatives",
            Command::VerifyRicci(_) => "verify-ricci",
            Command::RankRho => "rank-rho",
            Command::Cosmology => "cosmology",
        }
    }
}

pub fn run(cmd: Command, cfg: &RunConfig, timings: bool) -> Result<Report> {
    let (checks, scope) = match cmd {
        Command::VerifyDerivatives => (commands::verify_derivatives(cfg, timings)?, None),
        Command::VerifyRicci(s) => (commands::verify_ricci(cfg, s, timings)?, Some(s.name())),
        Command::RankRho => (commands::rank_rho(cfg, timings)?, None),
        Command::Cosmology => (commands::cosmology(cfg, timings)?, None),
    };
    Ok(Report::new(cmd.name(), scope, cfg, checks))
}
