//! Run manifest, written when a run starts and rewritten when it ends.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const FILE_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub version: String,
    pub started_unix: u64,
    /// Seconds; absent until the run is finalized.
    pub wall_time: Option<f64>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub master_seed: u64,
    pub workers: usize,
    /// Stream seed of each replica, by index. A replica's seed does not
    /// depend on which worker ran it.
    pub replica_seeds: Vec<u64>,
    pub outputs: Vec<PathBuf>,
}

/// Owns the manifest file for the duration of a run.
pub struct ManifestWriter {
    path: PathBuf,
    clock: Instant,
    pub manifest: RunManifest,
}

impl ManifestWriter {
    /// Writes the initial manifest into `dir`.
    pub fn start(dir: &Path, manifest: RunManifest) -> Result<Self> {
        let w = ManifestWriter {
            path: dir.join(FILE_NAME),
            clock: Instant::now(),
            manifest,
        };
        w.write()?;
        Ok(w)
    }

    pub fn now_unix() -> u64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    }

    fn write(&self) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.manifest)
            .map_err(|e| CliError::config(e.to_string()))?;
        std::fs::write(&self.path, text + "\n").map_err(|e| CliError::io(&self.path, e))
    }

    pub fn finish(mut self, outcome: std::result::Result<(), String>) -> Result<RunManifest> {
        self.manifest.wall_time = Some(self.clock.elapsed().as_secs_f64());
        match outcome {
            Ok(()) => self.manifest.status = Status::Ok,
            Err(e) => {
                self.manifest.status = Status::Failed;
                self.manifest.error = Some(e);
            }
        }
        self.write()?;
        Ok(self.manifest)
    }
}
