//! Run manifests: the resolved configuration, seed, and a checksum of every
//! emitted data file, so a run can be re-verified byte for byte.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
    /// What the file holds; "ccdf" files feed plotdata.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultManifest {
    pub scenario: String,
    pub seed: u64,
    /// Snapshot of the fully resolved settings the run used.
    pub config: serde_json::Value,
    pub files: Vec<FileEntry>,
    pub jobs_simulated: u64,
    pub wall_clock_seconds: f64,
}

impl ResultManifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).context("serializing manifest")?;
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Write one data file and return its manifest entry.
pub fn write_data_file(
    dir: &Path,
    name: &str,
    kind: &str,
    contents: &str,
    n: Option<usize>,
    k: Option<usize>,
) -> Result<FileEntry> {
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(FileEntry {
        name: name.to_string(),
        sha256: sha256_hex(contents.as_bytes()),
        bytes: contents.len() as u64,
        kind: kind.to_string(),
        n,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let entry = write_data_file(dir.path(), "x.csv", "ccdf", "a,b\n1,2\n", Some(8), Some(4))
            .unwrap();
        let m = ResultManifest {
            scenario: "dominance".to_string(),
            seed: 7,
            config: serde_json::json!({"n": 8}),
            files: vec![entry],
            jobs_simulated: 123,
            wall_clock_seconds: 0.5,
        };
        let path = m.write(dir.path()).unwrap();
        let back = ResultManifest::read(&path).unwrap();
        assert_eq!(back.scenario, "dominance");
        assert_eq!(back.files[0].n, Some(8));
        assert_eq!(back.files[0].sha256.len(), 64);
    }
}
