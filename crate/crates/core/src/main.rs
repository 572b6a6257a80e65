use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stcmc_core::cli;

/// Prescribed spacetime mean curvature flows, STCMC foliations and barrier
/// certificates on model null cones.
#[derive(Parser)]
#[command(name = "stcmc", version)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a TOML configuration and write its outputs below the output root.
    Run {
        config: PathBuf,
        /// Overrides $STCMC_OUTPUT_ROOT (default ./runs).
        #[arg(long)]
        output_root: Option<PathBuf>,
    },
    /// Write plot-data files for a completed run directory.
    Plots { run_dir: PathBuf },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match args.command {
        Cmd::Run { config, output_root } => {
            let out = cli::run_file(&config, &cli::output_root(output_root));
            for line in &out.summary {
                println!("{line}");
            }
            if let Some(dir) = &out.run_dir {
                println!("outputs in {}", dir.display());
            }
            out.exit_code
        }
        Cmd::Plots { run_dir } => match cli::emit_plots(&run_dir) {
            Ok(files) => {
                for f in files {
                    println!("{}", run_dir.join(f).display());
                }
                cli::EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                cli::exit_code(&e)
            }
        },
    };
    ExitCode::from(code as u8)
}
