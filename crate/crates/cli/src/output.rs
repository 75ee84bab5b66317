//! Output files carrying the config hash and seed.

use std::path::PathBuf;

use anyhow::{Context, Result};
use ergolab::report::RunMeta;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub struct Output {
    pub meta: RunMeta,
    dir: PathBuf,
}

/// First 16 hex digits of the SHA-256 of the JSON echo of `config`.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_string(config)?;
    let digest = Sha256::digest(json.as_bytes());
    Ok(digest.iter().take(8).map(|b| format!("{b:02x}")).collect())
}

impl Output {
    pub fn new<T: Serialize>(config: &T, seed: u64, dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { meta: RunMeta { config_hash: config_hash(config)?, seed }, dir })
    }

    pub fn write(&self, file: &str, body: &str) -> Result<()> {
        let path = self.dir.join(file);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    }
}
