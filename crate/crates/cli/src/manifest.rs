use std::collections::BTreeMap;
use std::path::Path;

use induced_markov::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const MANIFEST: &str = "manifest.json";

pub fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct StageEntry {
    pub version: String,
    pub seconds: f64,
    pub passed: bool,
    pub artifacts: BTreeMap<String, String>,
}

/// Provenance of the files in an output directory. Rewritten by every
/// command; timings make it the one file that is not reproducible.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub config: String,
    pub config_sha256: String,
    pub system: String,
    pub system_sha256: String,
    pub seed: u64,
    pub stages: BTreeMap<String, StageEntry>,
}

impl Manifest {
    pub fn load_or_new(out: &Path, cfg: &RunConfig) -> Manifest {
        let config_sha256 = sha256(cfg.source.as_bytes());
        let system_sha256 = sha256(cfg.system_source.as_bytes());
        let old = std::fs::read_to_string(out.join(MANIFEST))
            .ok()
            .and_then(|s| serde_json::from_str::<Manifest>(&s).ok())
            // results from another configuration are stale
            .filter(|m| m.config_sha256 == config_sha256 && m.system_sha256 == system_sha256 && m.seed == cfg.seed);
        old.unwrap_or_else(|| Manifest {
            config: cfg.path.display().to_string(),
            config_sha256,
            system: cfg.system_path.display().to_string(),
            system_sha256,
            seed: cfg.seed,
            stages: BTreeMap::new(),
        })
    }

    pub fn record(&mut self, out: &Path, stage: &str, seconds: f64, passed: bool, artifacts: &[String]) -> Result<()> {
        let mut hashes = BTreeMap::new();
        for a in artifacts {
            hashes.insert(a.clone(), sha256(&std::fs::read(out.join(a))?));
        }
        self.stages.insert(
            stage.to_string(),
            StageEntry {
                version: env!("CARGO_PKG_VERSION").to_string(),
                seconds,
                passed,
                artifacts: hashes,
            },
        );
        Ok(())
    }

    pub fn save(&self, out: &Path) -> Result<()> {
        std::fs::write(out.join(MANIFEST), crate::json::to_string(self))?;
        Ok(())
    }
}
