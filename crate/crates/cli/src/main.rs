use clap::Parser;
use sdelab_cli::{emit, load_config, run_command, Command, Format};
use std::path::PathBuf;

/// Numerical laboratory for scalar SDEs with power-law degenerate diffusion.
#[derive(Parser)]
#[command(name = "sdelab", version, about)]
struct Cli {
    /// JSON experiment config; omit to build one entirely from --set flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts (created if missing); stdout if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Override sim.master_seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the simulation engine (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override a config field by dotted path, e.g. --set sim.dt=0.005 or
    /// --set model.kind='"Pitchfork"'. Repeatable.
    #[arg(long = "set", global = true, value_name = "PATH=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // Ignore the error from setting the pool twice; it only happens in
        // in-process test harnesses.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = load_config(cli.config.as_deref(), &cli.set, cli.seed, cli.format)
        .and_then(|loaded| run_command(cli.command, &loaded))
        .and_then(|artifacts| emit(&artifacts, cli.out.as_deref()));
    match result {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
