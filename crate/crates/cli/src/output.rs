//! Atomic output files and the run manifest.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::run::Output;

pub const MANIFEST: &str = "manifest.json";

/// Everything needed to repeat a run: `circsync --config manifest.json`
/// reproduces the listed outputs byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub program: String,
    pub version: String,
    pub config: RunConfig,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(config: RunConfig, outputs: &[Output]) -> Self {
        Self {
            program: "circsync".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            outputs: outputs.iter().map(|o| o.name.clone()).collect(),
        }
    }
}

/// Writes `bytes` to `dir/name` through a temporary file in `dir`, so readers
/// never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let path = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(&path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(&path, e))?;
    tmp.persist(&path).map_err(|e| CliError::io(&path, e.error))?;
    Ok(())
}

/// Writes the outputs, then the manifest.
pub fn write_run(dir: &Path, config: &RunConfig, outputs: &[Output]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for o in outputs {
        write_atomic(dir, &o.name, &o.bytes)?;
    }
    let manifest = Manifest::new(config.clone(), outputs);
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifests serialize");
    bytes.push(b'\n');
    write_atomic(dir, MANIFEST, &bytes)
}
