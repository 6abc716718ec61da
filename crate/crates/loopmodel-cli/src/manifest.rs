//! Run manifests: every command records what ran, with which parameters
//! and seed, and the digests of the files it produced. Re-running the
//! recorded command reproduces exact outputs bit-identically and sampled
//! outputs statistically (bit-identically for the same seed).

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub artifact_version: String,
    pub unix_time: f64,
    pub wall_clock_secs: f64,
    pub outputs: Vec<OutputDigest>,
    /// Machine-readable results mirrored from the output files, when the
    /// command produces estimates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<serde_json::Value>,
}

impl RunManifest {
    pub fn new(params: serde_json::Value, seed: Option<u64>, wall_clock_secs: f64) -> Self {
        let command: Vec<String> = std::env::args().collect();
        Self {
            command: command.join(" "),
            params,
            seed,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            unix_time: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
            wall_clock_secs,
            outputs: Vec::new(),
            results: None,
        }
    }

    pub fn add_output(&mut self, path: &Path) -> std::io::Result<()> {
        let bytes = std::fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.outputs.push(OutputDigest { path: path.display().to_string(), sha256: hex });
        Ok(())
    }

    /// Writes the manifest next to `out` as `<out>.manifest.json`.
    pub fn write_beside(&self, out: &Path) -> std::io::Result<()> {
        let mut name = out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        let path = out.with_file_name(name);
        std::fs::write(&path, serde_json::to_string_pretty(self).unwrap())
    }
}
