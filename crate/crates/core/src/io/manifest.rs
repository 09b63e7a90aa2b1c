use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
}

/// Record of one CLI run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_sha256: String,
    pub grids: serde_json::Value,
    pub tolerances: serde_json::Value,
    pub diagnostics: serde_json::Value,
    pub wall_time_s: f64,
    pub files: Vec<FileRecord>,
}

impl RunManifest {
    pub fn new(command: &str, config_text: &str) -> Self {
        Self {
            command: command.to_string(),
            config_sha256: sha256_hex(config_text.as_bytes()),
            grids: serde_json::Value::Null,
            tolerances: serde_json::Value::Null,
            diagnostics: serde_json::Value::Null,
            wall_time_s: 0.0,
            files: Vec::new(),
        }
    }

    /// Writes `contents` to `dir/name` and records its checksum.
    pub fn write_file(&mut self, dir: &Path, name: &str, contents: &str) -> Result<()> {
        std::fs::write(dir.join(name), contents)?;
        self.files.push(FileRecord { path: name.to_string(), sha256: sha256_hex(contents.as_bytes()) });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| crate::Error::Config(e.to_string()))?;
        std::fs::write(dir.join("manifest.json"), text + "\n")?;
        Ok(())
    }
}
