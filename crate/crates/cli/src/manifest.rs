use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Provenance block embedded in every JSON report.
///
/// Everything except `wall_clock` is a pure function of the command line and
/// the input bytes; `--threads` is left out of `command` because it cannot
/// change any output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub result_sha256: String,
    pub wall_clock: WallClock,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct WallClock {
    pub started_unix_ms: u128,
    pub elapsed_ms: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `argv[1..]` with any `--threads N` / `--threads=N` removed.
pub fn command_line(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if a == "--threads" {
            skip = true;
            continue;
        }
        if a.starts_with("--threads=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

/// Collects inputs and timing while a command runs.
pub struct Recorder {
    command: Vec<String>,
    started: SystemTime,
    clock: Instant,
    inputs: Vec<InputDigest>,
}

impl Recorder {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            command,
            started: SystemTime::now(),
            clock: Instant::now(),
            inputs: Vec::new(),
        }
    }

    /// Read an input file, recording its digest.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn finish<C: Serialize, R: Serialize>(
        &self,
        config: &C,
        seed: Option<u64>,
        result: &R,
    ) -> Result<RunManifest> {
        let result_bytes = serde_json::to_vec(result)?;
        Ok(RunManifest {
            tool: "normctl",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.clone(),
            config: serde_json::to_value(config)?,
            seed,
            inputs: self
                .inputs
                .iter()
                .map(|d| InputDigest {
                    path: d.path.clone(),
                    sha256: d.sha256.clone(),
                })
                .collect(),
            result_sha256: sha256_hex(&result_bytes),
            wall_clock: WallClock {
                started_unix_ms: self
                    .started
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_millis())
                    .unwrap_or(0),
                elapsed_ms: self.clock.elapsed().as_secs_f64() * 1e3,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threads_are_dropped_from_the_command_line() {
        let argv: Vec<String> = ["normctl", "--threads", "8", "norm", "a.json", "--threads=2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(command_line(&argv), vec!["norm", "a.json"]);
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
