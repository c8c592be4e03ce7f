use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use swarmshape_cli::scenario::Kind;
use swarmshape_cli::{load_config, run_scenario, EXIT_OK, EXIT_USAGE};

/// Run a swarm-shaping experiment and write its CSV outputs.
#[derive(Debug, Parser)]
#[command(name = "swarmshape", version)]
struct Cli {
    /// Scenario to run.
    #[arg(value_enum)]
    kind: Kind,
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for every random choice in the scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "SWARMSHAPE_OUT", default_value = "swarmshape-out")]
    out: PathBuf,
    /// Extra KEY=VALUE settings, applied after the config file.
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { EXIT_OK as u8 });
        }
    };
    let result = load_config(cli.config.as_deref(), &cli.overrides, cli.seed)
        .and_then(|cfg| run_scenario(cli.kind, cfg, &cli.out));
    match result {
        Ok(out) => {
            let width = out.summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            println!("{} -> {}", cli.kind.name(), cli.out.display());
            for (k, v) in &out.summary {
                println!("  {k:<width$}  {v}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("swarmshape: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
