use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Default, Serialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

/// Record of one invocation. Contains no timestamps, so fixed seeds give a
/// byte-identical manifest.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub inputs: Vec<Artifact>,
    pub seeds: Vec<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub outputs: Vec<Artifact>,
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn artifacts(paths: &[PathBuf]) -> std::io::Result<Vec<Artifact>> {
    paths
        .iter()
        .map(|p| Ok(Artifact { path: p.display().to_string(), sha256: sha256_file(p)? }))
        .collect()
}
