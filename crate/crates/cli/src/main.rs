use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use igusa_cli::{run, Command, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "igusa", version, about = "Verification suites for Igusa towers and their Hecke structure")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// JSON configuration; defaults are used for absent fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Record per-case wall time, which makes reports nondeterministic.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Sub {
    /// Compare γ + δ − 1 with Σ d_k for every (p, N).
    VerifyIdentity,
    /// Hasse–Witt, Cartier and residue checks on curve families.
    Cartier,
    /// Synthetic tower hypotheses, control, limits and pairings.
    Tower,
    /// Component model: Hecke closed forms, contraction, splitting and tables.
    Fiber,
    All,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::VerifyIdentity => Command::VerifyIdentity,
            Sub::Cartier => Command::Cartier,
            Sub::Tower => Command::Tower,
            Sub::Fiber => Command::Fiber,
            Sub::All => Command::All,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("igusa: {e}");
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("igusa: {e}");
            return ExitCode::from(2);
        }
    };
    let report = pool.install(|| run(cli.command.into(), &cfg, cli.timing));
    let json = report.to_json();
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("igusa: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{json}"),
    }
    for r in report.results.iter().filter(|r| !r.passed) {
        eprintln!("FAIL {} {}{}", r.suite, r.case, r.error.as_deref().map(|e| format!(": {e}")).unwrap_or_default());
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
