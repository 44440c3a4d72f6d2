//! Run manifests: tool version, seeds, effective config and content digests
//! of every file read or written. No wall-clock fields.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub stage_seeds: BTreeMap<String, u64>,
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    #[serde(skip)]
    root: Option<PathBuf>,
}

impl Manifest {
    /// Paths under `root` are recorded relative to it.
    pub fn new(command: &str, seed: u64, config: &impl Serialize, root: Option<&Path>) -> Self {
        Manifest {
            tool: "plandiv",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_owned(),
            seed,
            stage_seeds: BTreeMap::new(),
            config: serde_json::to_value(config).expect("config serializes"),
            inputs: Vec::new(),
            outputs: Vec::new(),
            root: root.map(Path::to_path_buf),
        }
    }

    pub fn stage(&mut self, name: &str, seed: u64) -> u64 {
        self.stage_seeds.insert(name.to_owned(), seed);
        seed
    }

    fn digest(&self, path: &Path, bytes: &[u8]) -> FileDigest {
        let shown = self.root.as_deref().and_then(|r| path.strip_prefix(r).ok()).unwrap_or(path);
        FileDigest {
            path: shown.to_string_lossy().replace('\\', "/"),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        }
    }

    /// Reads an input file and records its digest.
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
        let d = self.digest(path, &bytes);
        self.inputs.push(d);
        Ok(bytes)
    }

    /// Writes an output file, creating parent directories, and records its digest.
    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::data(format!("cannot create {}: {e}", parent.display())))?;
        }
        fs::write(path, bytes).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
        let d = self.digest(path, bytes);
        self.outputs.push(d);
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
    }
}

/// `<file>.manifest.json` next to a single-file output.
pub fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}
