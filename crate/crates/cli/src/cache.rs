//! One JSON document per level under the cache directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use systole_core::geodesics::{IntersectionContext, IntersectionLimits};
use systole_core::IntersectionMatrix;

use crate::error::CliError;

/// Bumped whenever the intersection algorithm changes its output.
pub const ALGORITHM_VERSION: &str = "window-doubling-1";
pub const CACHE_SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema_version: String,
    pub n: i64,
    pub algorithm_version: String,
    /// SHA-256 of `(N, algorithm version)`.
    pub content_hash: String,
    pub matrix: IntersectionMatrix,
}

pub fn content_hash(n: i64, algorithm_version: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("N={n};algorithm={algorithm_version}"));
    hex::encode(h.finalize())
}

impl CacheEntry {
    pub fn new(matrix: IntersectionMatrix) -> Self {
        CacheEntry {
            schema_version: CACHE_SCHEMA_VERSION.into(),
            n: matrix.n,
            algorithm_version: ALGORITHM_VERSION.into(),
            content_hash: content_hash(matrix.n, ALGORITHM_VERSION),
            matrix,
        }
    }

    /// Whether the entry was written by this version for level `n`.
    pub fn is_current(&self, n: i64) -> bool {
        self.schema_version == CACHE_SCHEMA_VERSION
            && self.algorithm_version == ALGORITHM_VERSION
            && self.n == n
            && self.matrix.n == n
            && self.content_hash == content_hash(n, ALGORITHM_VERSION)
    }
}

#[derive(Debug, Clone)]
pub struct MatrixCache {
    dir: PathBuf,
}

impl MatrixCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CliError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(MatrixCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, n: i64) -> PathBuf {
        self.dir.join(format!("{n}.json"))
    }

    /// The cached matrix for `n`; missing, unreadable and stale entries all
    /// give `None`.
    pub fn load(&self, n: i64) -> Option<IntersectionMatrix> {
        let text = fs::read_to_string(self.path(n)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        entry.is_current(n).then_some(entry.matrix)
    }

    pub fn store(&self, matrix: &IntersectionMatrix) -> Result<(), CliError> {
        let path = self.path(matrix.n);
        let tmp = self.dir.join(format!(".{}.json.tmp", matrix.n));
        let text = serde_json::to_string_pretty(&CacheEntry::new(matrix.clone()))
            .expect("cache entries serialize");
        fs::write(&tmp, text + "\n").map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))
    }
}

/// The matrix for `n`, from the cache when present, storing fresh results.
pub fn cached_matrix(
    n: i64,
    limits: IntersectionLimits,
    cache: Option<&MatrixCache>,
) -> anyhow::Result<IntersectionMatrix> {
    if let Some(m) = cache.and_then(|c| c.load(n)) {
        return Ok(m);
    }
    let m = IntersectionContext::with_limits(n, limits)?.matrix()?;
    if let Some(c) = cache {
        c.store(&m)?;
    }
    Ok(m)
}
