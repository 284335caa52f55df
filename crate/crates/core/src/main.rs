use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use vheat::cli::{parse_config, run, Overrides};

#[derive(Parser)]
#[command(name = "vheat", version, about = "1-D heat conduction by the Lagrangian potential method")]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Number of positive wavenumbers N (modes run from −N to N).
    #[arg(long, global = true, value_name = "N")]
    modes: Option<usize>,

    /// Number of spatial sample points M.
    #[arg(long, global = true, value_name = "M")]
    points: Option<usize>,

    /// Suppress progress and comparison output.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured problem and write the CSV (and plot script).
    Run { config: PathBuf },
    /// Like `run`, but always compare against the finite-difference oracle.
    Compare { config: PathBuf },
}

fn configure_threads() {
    if let Some(n) = std::env::var("VHEAT_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    configure_threads();
    let (path, force_compare) = match &args.command {
        Command::Run { config } => (config, false),
        Command::Compare { config } => (config, true),
    };
    let overrides = Overrides { modes: args.modes, points: args.points, force_compare };
    let result = std::fs::read(path)
        .map_err(|e| vheat::Error::Config(format!("{}: {e}", path.display())))
        .and_then(|bytes| parse_config(&bytes))
        .and_then(|c| overrides.apply(c))
        .and_then(|c| run(&c));
    match result {
        Ok(report) => {
            if !args.quiet {
                if !report.comparison.is_empty() {
                    println!("t,rel_L2");
                    for (t, rel) in &report.comparison {
                        println!("{t},{rel:e}");
                    }
                }
                for p in &report.written {
                    eprintln!("wrote {}", p.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
