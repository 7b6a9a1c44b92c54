use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

/// Provenance attached to every JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub duration_ms: u64,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config: &impl Serialize,
        seed: Option<u64>,
        started: Instant,
    ) -> Result<Self, CliError> {
        Ok(RunManifest {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            duration_ms: started.elapsed().as_millis() as u64,
        })
    }
}

/// A command result with its manifest alongside the result fields.
#[derive(Serialize)]
pub struct Output<'a, T: Serialize> {
    #[serde(flatten)]
    pub body: &'a T,
    pub manifest: RunManifest,
}

pub fn emit_json(out: Option<&Path>, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

/// `runs/x.csv` → `runs/x.manifest.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}
