//! Run manifests: what was run, from which config, and when.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// SHA-256 of `bytes` hashed as a git blob (`"blob <len>\0"` prefix).
pub fn blob_sha256(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool_version: String,
    pub scenario: String,
    pub seed: u64,
    pub trials: usize,
    pub config_file: String,
    pub config_sha256: String,
    pub started_at: String,
    pub finished_at: String,
    pub degraded_trials: usize,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
