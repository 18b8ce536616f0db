//! Writing a run to its output directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::run::OutputFile;

pub const MANIFEST: &str = "manifest.json";
pub const EFFECTIVE_CONFIG: &str = "effective_config.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub bytes: usize,
}

/// Lists what a run produced. Contains no timestamps, so identical runs give
/// identical manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub master_seed: Option<u64>,
    pub files: Vec<ManifestEntry>,
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Writes the outputs, the effective config and the manifest. Refuses to
/// touch a directory holding an earlier manifest unless `force` is set.
pub fn write_run(cfg: &RunConfig, outputs: &[OutputFile], force: bool) -> Result<Manifest> {
    let dir = &cfg.output_dir;
    let manifest_path = dir.join(MANIFEST);
    if manifest_path.exists() && !force {
        return Err(CliError::ManifestExists(manifest_path));
    }
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;

    let mut files = Vec::new();
    let config = cfg.to_toml();
    for (name, bytes) in outputs
        .iter()
        .map(|f| (f.name.as_str(), f.bytes.as_slice()))
        .chain([(EFFECTIVE_CONFIG, config.as_bytes())])
    {
        write(&dir.join(name), bytes)?;
        files.push(ManifestEntry { name: name.to_string(), bytes: bytes.len() });
    }
    let manifest = Manifest {
        command: cfg.command.name().to_string(),
        master_seed: cfg.master_seed,
        files,
    };
    let mut json = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Schema(e.to_string()))?;
    json.push(b'\n');
    write(&manifest_path, &json)?;
    log::info!("wrote {} files to {}", manifest.files.len() + 1, dir.display());
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path: PathBuf = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}
