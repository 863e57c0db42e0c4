//! `stickel`: batch computations of partial zeta values and Stickelberger
//! elements with machine-readable reports.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
//! 3 a bounded search gave up.

mod commands;
mod config;
mod distcheck;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use commands::{CommandError, Flags, Outcome};
use config::{ConfigError, JobConfig};

#[derive(Parser, Debug)]
#[command(name = "stickel", version)]
#[command(about = "Partial zeta values and Stickelberger elements over Q and real quadratic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Job configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Seed for every randomized step; echoed into the report
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Also check membership after localizing at two coprime smoothing sets
    #[arg(long, global = true, default_value_t = false)]
    gcd_trick: bool,

    /// Write the JSON report here instead of standard output
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    /// Report (never assert) membership for archimedean exceptional places
    #[arg(long, global = true, default_value_t = false)]
    experimental_arch_p: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partial zeta values of ray classes at s = -k
    Zeta,
    /// Stickelberger elements Θ_S and Θ_{S,T}
    Stickelberger,
    /// Integrality and ideal membership of Θ_{S,T} for every k and exceptional place
    #[command(name = "verify-thm13")]
    VerifyThm13,
    /// Randomized checks of the distribution / group-ring isomorphism
    Distcheck {
        /// Lattice rank (1..=3)
        #[arg(long)]
        n: Option<usize>,
        /// Truncation level (0..=6)
        #[arg(long)]
        m: Option<u32>,
        /// Number of trials
        #[arg(long)]
        trials: Option<u32>,
    },
    /// Narrow ray class group and field invariants
    Raygroup,
}

fn load_config(cli: &Cli, required: bool) -> Result<JobConfig, ConfigError> {
    match &cli.config {
        Some(path) => config::load(path),
        None if required => Err(ConfigError::new("--config", "this command needs a configuration file")),
        None => Ok(JobConfig::default()),
    }
}

fn run(cli: &Cli) -> Result<Outcome, CommandError> {
    let flags = Flags { seed: cli.seed, gcd_trick: cli.gcd_trick, experimental_arch_p: cli.experimental_arch_p };
    match &cli.command {
        Command::Zeta => commands::zeta(&load_config(cli, true)?, &flags),
        Command::Stickelberger => commands::stickelberger_cmd(&load_config(cli, true)?, &flags),
        Command::VerifyThm13 => commands::verify_thm13(&load_config(cli, true)?, &flags),
        Command::Raygroup => commands::raygroup(&load_config(cli, true)?, &flags),
        Command::Distcheck { n, m, trials } => {
            let cfg = load_config(cli, false)?;
            let spec = cfg.distcheck.as_ref();
            let n = n.or(spec.and_then(|s| s.n)).unwrap_or(2);
            let m = m.or(spec.and_then(|s| s.m)).unwrap_or(3);
            let trials = trials.or(spec.and_then(|s| s.trials)).unwrap_or(100);
            distcheck::distcheck(n, m, trials, &flags)
        }
    }
}

fn emit(cli: &Cli, report: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("reports are plain JSON") + "\n";
    match &cli.json {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    let (report, code) = match run(&cli) {
        Ok(outcome) => {
            let code = if outcome.search_error {
                3
            } else if outcome.failed {
                1
            } else {
                0
            };
            (outcome.report, code)
        }
        Err(CommandError::Config(e)) => {
            eprintln!("config error: {e}");
            (
                json!({ "schema": report::SCHEMA, "error": { "kind": "config", "field": e.field, "message": e.message } }),
                2,
            )
        }
        Err(CommandError::Search(m)) => {
            eprintln!("search bound reached: {m}");
            (json!({ "schema": report::SCHEMA, "error": { "kind": "search", "message": m } }), 3)
        }
        Err(CommandError::Internal(m)) => {
            eprintln!("error: {m}");
            (json!({ "schema": report::SCHEMA, "error": { "kind": "failure", "message": m } }), 1)
        }
    };
    if let Err(e) = emit(&cli, &report) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
