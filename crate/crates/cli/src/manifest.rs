//! Output collection, hashing and the run manifest.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: Option<String>,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputEntry>,
    pub warnings: Vec<String>,
}

/// Files produced by one command, held in memory until written or checked.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
    pub warnings: Vec<String>,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("serialisable");
        bytes.push(b'\n');
        self.add(name, bytes);
    }

    pub fn warn(&mut self, w: impl ToString) {
        self.warnings.push(w.to_string());
    }

    fn entries(&self) -> Vec<OutputEntry> {
        self.files
            .iter()
            .map(|(name, bytes)| OutputEntry {
                path: name.clone(),
                sha256: sha256_hex(bytes),
                bytes: bytes.len() as u64,
            })
            .collect()
    }

    /// Write every file and the manifest into `dir`.
    pub fn write(
        &self,
        dir: &Path,
        command: String,
        config_hash: Option<String>,
        wall_time_s: f64,
    ) -> std::io::Result<RunManifest> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            fs::write(dir.join(name), bytes)?;
        }
        let manifest = RunManifest {
            command,
            config_hash,
            tool_version: sacs_core::TOOL_VERSION.to_string(),
            wall_time_s,
            outputs: self.entries(),
            warnings: self.warnings.clone(),
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).expect("serialisable");
        bytes.push(b'\n');
        fs::write(dir.join(MANIFEST), bytes)?;
        Ok(manifest)
    }

    /// Compare freshly computed outputs with the manifest and files already
    /// in `dir`. Returns one message per mismatch.
    pub fn check(&self, dir: &Path) -> std::io::Result<Vec<String>> {
        let text = fs::read_to_string(dir.join(MANIFEST))?;
        let manifest: RunManifest = serde_json::from_str(&text)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        let mut problems = Vec::new();
        for entry in self.entries() {
            match manifest.outputs.iter().find(|o| o.path == entry.path) {
                None => problems.push(format!("{}: not in manifest", entry.path)),
                Some(rec) if rec.sha256 != entry.sha256 => {
                    problems.push(format!("{}: recomputed hash differs from manifest", entry.path))
                }
                Some(rec) => match fs::read(dir.join(&rec.path)) {
                    Ok(bytes) if sha256_hex(&bytes) == rec.sha256 => {}
                    Ok(_) => problems.push(format!("{}: file on disk differs from manifest", rec.path)),
                    Err(e) => problems.push(format!("{}: {e}", rec.path)),
                },
            }
        }
        for rec in &manifest.outputs {
            if !self.files.iter().any(|(n, _)| *n == rec.path) {
                problems.push(format!("{}: listed in manifest but not produced", rec.path));
            }
        }
        Ok(problems)
    }
}
