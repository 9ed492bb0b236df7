use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lab::{run_command, Command, Options};

#[derive(Parser)]
#[command(name = "lab", version, about = "Spectral experiments on the periodic box")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Subcommand)]
enum Cmd {
    /// Build initial data, block manifest and norm tables.
    Construct(Args),
    /// Trilinear scaling and norm-table checks.
    Verify(Args),
    /// Admissible parameter region on a grid.
    Region(Args),
    /// Run the solver and its diagnostics.
    Simulate(Args),
    /// Summarise a stored experiment from its manifest.
    Report(Args),
}

#[derive(Clone, clap::Args)]
struct Args {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Run twice and compare all reported numbers.
    #[arg(long)]
    seed_check: bool,
    /// Treat the closed region boundaries as strict.
    #[arg(long)]
    strict_boundaries: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let (cmd, a) = match cli.cmd {
        Cmd::Construct(a) => (Command::Construct, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Region(a) => (Command::Region, a),
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Report(a) => (Command::Report, a),
    };
    let opt = Options {
        config: a.config,
        out: a.out.unwrap_or_else(|| PathBuf::from("runs")),
        seed_check: a.seed_check,
        strict_boundaries: a.strict_boundaries,
    };
    let res = run_command(cmd, &opt);
    if let Some(d) = &res.dir {
        println!("{}", d.display());
    }
    if let Some(m) = &res.message {
        eprintln!("lab {}: {m}", cmd.name());
    }
    ExitCode::from(res.code() as u8)
}
