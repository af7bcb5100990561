use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use projsq::scenario::{list, run_scenario, write_outputs, ScenarioConfig};
use projsq::Error;

#[derive(Parser)]
#[command(name = "projsq", version, about = "Smeared stabilizer projection scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write <out>/<scenario>.csv
    Run {
        scenario: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed
        #[arg(long, env = "PROJSQ_SEED")]
        seed: Option<u64>,
        /// Overrides the config truncation
        #[arg(long, env = "PROJSQ_DIM")]
        dim: Option<usize>,
        /// Also write a line chart
        #[arg(long)]
        svg: bool,
    },
    /// List scenarios
    List,
}

fn tolerance_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::TruncationNotConverged { .. }
            | Error::TruncationOverflow { .. }
            | Error::CombNotConverged(_)
            | Error::QuadratureNotConverged(_)
            | Error::StepControl(_)
            | Error::DenominatorDegenerate { .. }
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::List => {
            print!("{}", list());
            ExitCode::SUCCESS
        }
        Command::Run { scenario, config, out, seed, dim, svg } => {
            let run = || -> projsq::Result<Vec<PathBuf>> {
                let mut cfg = ScenarioConfig::from_file(&scenario, &config, out)?;
                if let Some(s) = seed {
                    cfg.set("seed", s);
                }
                if let Some(d) = dim {
                    cfg.set("dim", d);
                }
                let table = run_scenario(&cfg)?;
                write_outputs(&cfg, &table, svg)
            };
            match run() {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("projsq: {e}");
                    ExitCode::from(if tolerance_failure(&e) { 2 } else { 1 })
                }
            }
        }
    }
}
