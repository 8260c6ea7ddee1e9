//! Output directory bookkeeping and `manifest.json`.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Files written during one command, hashed as they are written.
pub struct Artifacts {
    dir: PathBuf,
    entries: Vec<Entry>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            entries: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let bytes = contents.as_ref();
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.entries.retain(|e| e.path != name);
        self.entries.push(Entry {
            path: name.to_string(),
            sha256: hex(&Sha256::digest(bytes)),
            bytes: bytes.len(),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text)
    }

    /// Writes `manifest.json` listing every artifact by name.
    pub fn finish(mut self) -> Result<PathBuf> {
        self.entries.sort_by(|a, b| a.path.cmp(&b.path));
        let mut text = serde_json::to_string_pretty(&serde_json::json!({ "artifacts": self.entries }))?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
