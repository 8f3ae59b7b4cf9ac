use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::Cli;
use crate::VERSION;

/// Everything needed to regenerate an output file byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// Full parsed invocation (including defaults and environment overrides).
    pub invocation: Cli,
    pub seed: Option<u64>,
    pub rng: String,
    pub version: String,
    pub duration_seconds: f64,
    pub output_bytes: usize,
    pub output_sha256: String,
}

impl RunManifest {
    pub fn new(cli: &Cli, body: &str, duration_seconds: f64) -> Self {
        Self {
            command: cli.command.name().to_string(),
            invocation: cli.clone(),
            seed: cli.command.seed(),
            rng: hopf_collapse::rng::GENERATOR.to_string(),
            version: VERSION.to_string(),
            duration_seconds,
            output_bytes: body.len(),
            output_sha256: sha256_hex(body.as_bytes()),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
