//! Run metadata: everything a reader needs to reproduce an output.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    /// Crate version of the binary that produced the output.
    pub version: String,
    /// Full argument vector, program name excluded.
    pub argv: Vec<String>,
    /// Seed of the run, when the command is stochastic.
    pub seed: Option<u64>,
    /// SHA-256 of the raw input bytes, when a file was read.
    pub input_sha256: Option<String>,
}

impl RunMeta {
    pub fn collect(seed: Option<u64>, input_bytes: Option<&[u8]>) -> Self {
        RunMeta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            argv: std::env::args().skip(1).collect(),
            seed,
            input_sha256: input_bytes.map(sha256_hex),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
