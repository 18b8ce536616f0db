use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tbon_cli::config::OUTPUT_DIR_ENV;
use tbon_cli::{execute, parse_config, CliError, Overrides};

#[derive(Parser)]
#[command(name = "tbon", version, about = "Best-of-N gradient experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed (required by every randomized command).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; beats the environment variable and the config file.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Override a config value, e.g. `--set trials=500` or `--set gpucb.kernel=matern`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Replace the outputs of an earlier run in the same directory.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Selected-direction statistics for the linear field.
    Theorem1,
    /// Gap and spacing of Gaussian maxima.
    Maxstats,
    /// Spherical cap coverage by uniform directions.
    Capstats,
    /// GP-UCB regret on a test function, with a random-search baseline.
    Gpucb,
    /// Accuracy of noisy pairwise brackets.
    Tournament,
    /// Multi-trajectory Best-of-N optimization.
    Tbon,
    /// Best and worst arm identification under a fixed budget.
    Identify,
    /// Grouped mean and standard error over result CSVs.
    Summarize {
        inputs: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        group_by: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        metrics: Vec<String>,
    },
}

fn toml_list<T: std::fmt::Debug>(items: &[T]) -> String {
    let quoted: Vec<String> = items.iter().map(|i| format!("{:?}", i)).collect();
    format!("[{}]", quoted.join(", "))
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    let (name, mut set) = match &cli.command {
        Cmd::Theorem1 => ("theorem1", vec![]),
        Cmd::Maxstats => ("maxstats", vec![]),
        Cmd::Capstats => ("capstats", vec![]),
        Cmd::Gpucb => ("gpucb", vec![]),
        Cmd::Tournament => ("tournament", vec![]),
        Cmd::Tbon => ("tbon", vec![]),
        Cmd::Identify => ("identify", vec![]),
        Cmd::Summarize { inputs, group_by, metrics } => {
            let mut set = Vec::new();
            if !inputs.is_empty() {
                set.push(format!("summarize.inputs={}", toml_list(inputs)));
            }
            if !group_by.is_empty() {
                set.push(format!("summarize.group_by={}", toml_list(group_by)));
            }
            if !metrics.is_empty() {
                set.push(format!("summarize.metrics={}", toml_list(metrics)));
            }
            ("summarize", set)
        }
    };
    set.extend(cli.common.set.iter().cloned());
    let text = match &cli.common.config {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?),
        None => None,
    };
    let overrides = Overrides {
        set,
        seed: cli.common.seed,
        output_dir: cli.common.output_dir.clone(),
        env_output_dir: std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from),
    };
    let cfg = parse_config(name, text.as_deref(), &overrides)?;
    let manifest = execute(&cfg, cli.common.force)?;
    for f in &manifest.files {
        println!("{}", cfg.output_dir.join(&f.name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
