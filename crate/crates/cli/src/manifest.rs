//! The run manifest: provenance for every artifact a command writes.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    /// Digest of the effective settings the run used.
    pub config_sha256: String,
    /// Wall clock; the one field excluded from determinism comparisons.
    pub created_unix: u64,
    pub effective_config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub artifacts: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|byte| format!("{byte:02x}"))
        .collect()
}

/// Collects artifacts under one output directory and finishes by writing
/// `manifest.json` alongside them.
pub struct Workspace {
    out_dir: PathBuf,
    inputs: Vec<FileDigest>,
    artifacts: Vec<FileDigest>,
}

impl Workspace {
    pub fn create(out_dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(out_dir)
            .map_err(|e| CliError::Data(format!("cannot create {}: {e}", out_dir.display())))?;
        Ok(Workspace {
            out_dir: out_dir.to_path_buf(),
            inputs: Vec::new(),
            artifacts: Vec::new(),
        })
    }

    /// Record an input file's digest for the manifest.
    pub fn note_input(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    /// Write one artifact and record its digest.
    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        let bytes = contents.as_ref();
        let path = self.out_dir.join(name);
        std::fs::write(&path, bytes)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
        self.artifacts.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Data(format!("cannot serialize {name}: {e}")))?;
        text.push('\n');
        self.write(name, text)
    }

    /// Write the manifest and finish the run.
    pub fn finish(
        mut self,
        command: &str,
        seed: u64,
        effective_config: serde_json::Value,
    ) -> Result<(), CliError> {
        self.artifacts.sort_by(|a, b| a.path.cmp(&b.path));
        let config_bytes = serde_json::to_vec(&effective_config)
            .map_err(|e| CliError::Data(format!("cannot serialize config: {e}")))?;
        let manifest = RunManifest {
            tool: "orgnet",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            config_sha256: sha256_hex(&config_bytes),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            effective_config,
            inputs: self.inputs,
            artifacts: self.artifacts,
        };
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Data(format!("cannot serialize manifest: {e}")))?;
        text.push('\n');
        let path = self.out_dir.join("manifest.json");
        std::fs::write(&path, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }
}
