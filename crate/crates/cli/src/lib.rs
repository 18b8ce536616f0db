//! Config-driven experiment runner.
//!
//! Every command reads a TOML config (optional), applies command-line
//! overrides, runs, and writes CSV/JSON outputs plus `effective_config.toml`
//! and `manifest.json` to the output directory.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod summarize;

pub use config::{parse_config, Command, Overrides, RunConfig};
pub use error::{CliError, Result};
pub use output::{read_manifest, write_run, Manifest};
pub use run::{run, OutputFile};

/// Runs `cfg` and writes its outputs.
pub fn execute(cfg: &RunConfig, force: bool) -> Result<Manifest> {
    log::info!("running {}", cfg.command.name());
    let outputs = run(cfg)?;
    write_run(cfg, &outputs, force)
}
