use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Machine-readable record of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 over the input files, in argument order.
    pub inputs_digest: String,
    /// Effective configuration with defaults resolved.
    pub config: Value,
    pub results: Value,
    pub exit_status: i32,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Hex SHA-256 of the concatenated `(name, contents)` pairs; unreadable files
/// contribute their name only.
pub fn inputs_digest(paths: &[&Path]) -> String {
    let mut hasher = Sha256::new();
    for p in paths {
        hasher.update(p.display().to_string().as_bytes());
        hasher.update([0]);
        if let Ok(bytes) = std::fs::read(p) {
            hasher.update(&bytes);
        }
        hasher.update([0]);
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
