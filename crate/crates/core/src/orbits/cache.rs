//! Content-addressed disk cache for orbit tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{primitive_orbits, MappingTorusModel, OrbitTable};
use crate::error::Result;
use crate::exec::Execution;

pub const CACHE_ENV: &str = "ZETAFORGE_CACHE";
pub const DEFAULT_CACHE_DIR: &str = "./.zetaforge-cache";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
}

pub fn cache_dir_from_env() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

fn cache_key(model: &MappingTorusModel, max_period: u32) -> String {
    let m = model.matrix();
    let key = format!(
        "orbits-v1|{},{},{},{}|{:016x}|{}",
        m[0][0],
        m[0][1],
        m[1][0],
        m[1][1],
        model.return_time().to_bits(),
        max_period
    );
    hex::encode(Sha256::digest(key.as_bytes()))
}

/// Loads the table for (matrix, ℓ, max_period) from `dir`, computing and
/// storing it on a miss. Writes go through a temp file and an atomic rename.
pub fn cached_primitive_orbits(
    model: &MappingTorusModel,
    max_period: u32,
    dir: &Path,
    exec: Execution,
) -> Result<(OrbitTable, CacheStatus)> {
    let path = dir.join(format!("orbits-{}.json", cache_key(model, max_period)));
    if let Ok(bytes) = fs::read(&path) {
        match serde_json::from_slice::<OrbitTable>(&bytes) {
            Ok(table) => {
                log::info!("orbit cache hit: {}", path.display());
                return Ok((table, CacheStatus::Hit));
            }
            Err(e) => log::warn!("ignoring unreadable cache entry {}: {e}", path.display()),
        }
    }
    let table = primitive_orbits(model, max_period, exec)?;
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(&serde_json::to_vec_pretty(&table)?)?;
    tmp.persist(&path).map_err(|e| e.error)?;
    log::info!("orbit cache miss, stored {}", path.display());
    Ok((table, CacheStatus::Miss))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_lookup_hits_with_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let model = MappingTorusModel::cat(1.0);
        let (a, s1) = cached_primitive_orbits(&model, 12, dir.path(), Execution::Sequential).unwrap();
        let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1);
        let bytes1 = fs::read(files[0].as_ref().unwrap().path()).unwrap();
        let (b, s2) = cached_primitive_orbits(&model, 12, dir.path(), Execution::Sequential).unwrap();
        let bytes2 = fs::read(files[0].as_ref().unwrap().path()).unwrap();
        assert_eq!((s1, s2), (CacheStatus::Miss, CacheStatus::Hit));
        assert_eq!(a, b);
        assert_eq!(bytes1, bytes2);
    }

    #[test]
    fn keys_separate_parameters() {
        let m1 = MappingTorusModel::cat(1.0);
        let m2 = MappingTorusModel::cat(2.0);
        assert_ne!(cache_key(&m1, 10), cache_key(&m2, 10));
        assert_ne!(cache_key(&m1, 10), cache_key(&m1, 11));
    }
}
