//! Run manifests. The manifest is written before any other output and
//! rewritten as artifacts are produced, so an interrupted run still
//! records what it was asked to do.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use netzero_core::env::ObservationMode;
use netzero_core::solvers::SeedSet;
use serde::{Deserialize, Serialize};

use crate::config::{sha256_hex, LoadedConfig};
use crate::error::{HarnessError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSetRecord {
    pub name: String,
    pub seeds: Vec<u64>,
}

impl From<&SeedSet> for SeedSetRecord {
    fn from(s: &SeedSet) -> Self {
        Self {
            name: s.name().to_string(),
            seeds: s.seeds().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub written_at_unix_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// `None` when the built-in default configuration was used.
    pub config_path: Option<String>,
    pub config_sha256: String,
    pub solvers: Vec<String>,
    /// Settings of the solvers named above, as used.
    pub solver_config: Option<serde_json::Value>,
    pub seed_set: SeedSetRecord,
    pub mode: ObservationMode,
    pub deterministic: bool,
    pub started_at_unix_ms: u128,
    pub finished_at_unix_ms: Option<u128>,
    pub artifacts: Vec<ArtifactRecord>,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// Owns the output directory for one command.
#[derive(Debug)]
pub struct RunWriter {
    dir: PathBuf,
    manifest: RunManifest,
}

pub struct RunSpec<'a> {
    pub command: &'a str,
    pub config: &'a LoadedConfig,
    pub solvers: Vec<String>,
    pub solver_config: Option<serde_json::Value>,
    pub seed_set: &'a SeedSet,
    pub mode: ObservationMode,
    pub deterministic: bool,
}

impl RunWriter {
    /// Creates `dir` and writes the initial manifest.
    pub fn begin(dir: &Path, spec: RunSpec<'_>) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let manifest = RunManifest {
            tool: "netzero".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: spec.command.into(),
            config_path: spec.config.path.as_ref().map(|p| p.display().to_string()),
            config_sha256: spec.config.sha256.clone(),
            solvers: spec.solvers,
            solver_config: spec.solver_config,
            seed_set: spec.seed_set.into(),
            mode: spec.mode,
            deterministic: spec.deterministic,
            started_at_unix_ms: now_ms(),
            finished_at_unix_ms: None,
            artifacts: Vec::new(),
        };
        let w = Self {
            dir: dir.to_path_buf(),
            manifest,
        };
        w.flush()?;
        Ok(w)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn flush(&self) -> Result<()> {
        let path = self.dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serialises");
        std::fs::write(&path, text + "\n").map_err(|e| HarnessError::io(path, e))
    }

    /// Writes `bytes` to `rel` under the output directory and records it.
    pub fn write(&mut self, rel: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
        }
        std::fs::write(&path, bytes.as_ref()).map_err(|e| HarnessError::io(&path, e))?;
        self.manifest.artifacts.push(ArtifactRecord {
            path: rel.to_string(),
            sha256: sha256_hex(bytes.as_ref()),
            written_at_unix_ms: now_ms(),
        });
        self.flush()?;
        Ok(path)
    }

    pub fn finish(mut self) -> Result<RunManifest> {
        self.manifest.finished_at_unix_ms = Some(now_ms());
        self.flush()?;
        Ok(self.manifest)
    }
}
