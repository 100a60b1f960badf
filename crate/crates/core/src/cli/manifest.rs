use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::models::CHECKPOINT_VERSION;
use crate::schema::LabelSchema;

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_file(path: &Path) -> Result<String> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = reader.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Provenance record written next to every command's outputs.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub checkpoint_version: u32,
    pub schema_fingerprint: String,
    pub created_utc: String,
    pub seed: u64,
    pub config: Value,
    /// Input path → sha256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub summary: Value,
}

pub struct ManifestBuilder {
    command: String,
    config: RunConfig,
    inputs: Vec<PathBuf>,
    outputs: Vec<String>,
    summary: BTreeMap<String, Value>,
}

impl ManifestBuilder {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            config: config.clone(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn output(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    pub fn summary(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
    }

    pub fn write(self, out_dir: &Path) -> Result<()> {
        let mut inputs = BTreeMap::new();
        for p in self.inputs.iter().chain(&self.config.config) {
            inputs.insert(p.display().to_string(), sha256_file(p)?);
        }
        let manifest = Manifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION").to_string(),
            checkpoint_version: CHECKPOINT_VERSION,
            schema_fingerprint: format!("{:016x}", LabelSchema::standard().fingerprint()),
            created_utc: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            seed: self.config.seed(),
            config: serde_json::to_value(&self.config)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?,
            inputs,
            outputs: self.outputs,
            summary: serde_json::to_value(self.summary)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?,
        };
        let path = out_dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }
}
