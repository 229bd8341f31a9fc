//! Artifact emission: JSON reports and CSV tables, every file stamped with
//! the config hash and library version so runs are attributable and
//! byte-reproducible.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Emitter {
    out_dir: PathBuf,
    config_hash: String,
    written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Stamped<T: Serialize> {
    config_sha256: String,
    version: String,
    #[serde(flatten)]
    payload: T,
}

impl Emitter {
    pub fn new(out_dir: &Path, config_text: &str) -> Result<Self> {
        fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
        let mut hasher = Sha256::new();
        hasher.update(config_text.as_bytes());
        Ok(Emitter {
            out_dir: out_dir.to_path_buf(),
            config_hash: format!("{:x}", hasher.finalize()),
            written: Vec::new(),
        })
    }


    pub fn write_json<T: Serialize>(&mut self, name: &str, payload: T) -> Result<()> {
        let stamped = Stamped {
            config_sha256: self.config_hash.clone(),
            version: VERSION.to_string(),
            payload,
        };
        let mut text = serde_json::to_string_pretty(&stamped)?;
        text.push('\n');
        let path = self.out_dir.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, header: &str, rows: &[String]) -> Result<()> {
        let mut text = format!(
            "# config_sha256={} version={}\n{header}\n",
            self.config_hash, VERSION
        );
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        let path = self.out_dir.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    pub fn summary(&self) -> String {
        self.written
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }
}
