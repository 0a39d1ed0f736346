//! Content-addressed on-disk cache of term documents.
//!
//! A document is stored as `<dir>/<sha256>.json`, where the hash covers every
//! input that determines the document plus the tool version. Entries are
//! the plain JSON documents and can be diffed or used as fixtures.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::document::OutputDocument;
use crate::error::CliError;

/// Overrides the cache location.
pub const CACHE_DIR_ENV: &str = "BCHTERM_CACHE_DIR";

/// Everything a term document depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheKey {
    pub mode: String,
    pub order: usize,
    pub factors: usize,
    pub series: Vec<String>,
    pub letters: Vec<String>,
    pub dynkin: bool,
}

impl CacheKey {
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        let fields = [
            format!("version={}", env!("CARGO_PKG_VERSION")),
            format!("mode={}", self.mode),
            format!("order={}", self.order),
            format!("factors={}", self.factors),
            format!("series={}", self.series.join(";")),
            format!("letters={}", self.letters.join(",")),
            format!("dynkin={}", self.dynkin),
        ];
        for f in fields {
            h.update(f.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$BCHTERM_CACHE_DIR`, else `$XDG_CACHE_HOME/bchterm`, else
    /// `$HOME/.cache/bchterm`.
    pub fn from_env() -> Option<Self> {
        if let Some(dir) = env::var_os(CACHE_DIR_ENV).filter(|d| !d.is_empty()) {
            return Some(Self::new(dir));
        }
        if let Some(xdg) = env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
            return Some(Self::new(Path::new(&xdg).join("bchterm")));
        }
        env::var_os("HOME").map(|home| Self::new(Path::new(&home).join(".cache").join("bchterm")))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    /// A cached document, or `None` on a miss. Unreadable or corrupt entries
    /// count as misses.
    pub fn load(&self, key: &CacheKey) -> Option<OutputDocument> {
        let text = fs::read_to_string(self.path_for(key)).ok()?;
        OutputDocument::from_json(&text).ok()
    }

    pub fn store(&self, key: &CacheKey, doc: &OutputDocument) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::io(format!("creating cache dir {}", self.dir.display()), e))?;
        let path = self.path_for(key);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, doc.to_json())
            .map_err(|e| CliError::io(format!("writing {}", tmp.display()), e))?;
        fs::rename(&tmp, &path)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
        Ok(path)
    }
}
