use serde::Serialize;
use sha2::{Digest, Sha256};

/// Hex SHA-256 of the scenario bytes.
pub fn digest_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Provenance of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub parameters: serde_json::Value,
    pub input_sha256: String,
    pub outputs: Vec<String>,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run record serialises")
    }
}
