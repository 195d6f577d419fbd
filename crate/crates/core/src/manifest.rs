//! `manifest.json`: one per output directory, updated by every stage.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, SpillError};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub started_at: String,
    pub finished_at: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub parameters: serde_json::Value,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub code_version: String,
    pub config_path: String,
    pub config_hash: String,
    pub updated_at: String,
    pub stages: BTreeMap<String, StageRecord>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Digest of a file; `label` is the path recorded in the manifest.
pub fn digest_file(path: &Path, label: impl Into<String>) -> Result<FileDigest> {
    let bytes = std::fs::read(path).map_err(|source| SpillError::Io {
        stage: "manifest",
        path: path.to_path_buf(),
        source,
    })?;
    Ok(FileDigest {
        path: label.into(),
        sha256: sha256_hex(&bytes),
        bytes: bytes.len() as u64,
    })
}

/// Digests of files under `out_dir`, recorded by their relative paths.
pub fn digest_outputs(out_dir: &Path, rel: &[PathBuf]) -> Result<Vec<FileDigest>> {
    rel.iter()
        .map(|r| digest_file(&out_dir.join(r), r.to_string_lossy().replace('\\', "/")))
        .collect()
}

impl RunManifest {
    pub fn new(config_path: &Path, config_bytes: &[u8]) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            config_path: config_path.display().to_string(),
            config_hash: sha256_hex(config_bytes),
            updated_at: now_rfc3339(),
            stages: BTreeMap::new(),
        }
    }

    /// Loads the manifest in `out_dir`, or starts a fresh one. A manifest
    /// written under a different config is replaced.
    pub fn open(out_dir: &Path, config_path: &Path, config_bytes: &[u8]) -> Result<Self> {
        let fresh = Self::new(config_path, config_bytes);
        let path = out_dir.join(MANIFEST_FILE);
        let Ok(text) = std::fs::read_to_string(&path) else {
            return Ok(fresh);
        };
        match serde_json::from_str::<RunManifest>(&text) {
            Ok(m) if m.config_hash == fresh.config_hash && m.code_version == fresh.code_version => {
                Ok(m)
            }
            Ok(_) => {
                log::info!(
                    "{}: config or version changed, starting a new manifest",
                    path.display()
                );
                Ok(fresh)
            }
            Err(e) => {
                log::warn!(
                    "{}: unreadable manifest ({e}), replacing it",
                    path.display()
                );
                Ok(fresh)
            }
        }
    }

    pub fn record(&mut self, stage: &str, record: StageRecord) {
        self.updated_at = now_rfc3339();
        self.stages.insert(stage.to_string(), record);
    }

    pub fn write(&self, out_dir: &Path) -> Result<()> {
        let path = out_dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|source| SpillError::Io {
            stage: "manifest",
            path,
            source,
        })
    }
}
