use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

/// SHA-256 over git's blob framing: `"blob <len>\0" ‖ bytes`.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Side record written next to every experiment CSV.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: Option<u64>,
    /// Hash of the canonical parameter text plus any input files.
    pub input_hash: String,
    pub outputs: Vec<String>,
    /// Headline results, such as the outcome of an asserted inequality.
    pub results: BTreeMap<String, String>,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
