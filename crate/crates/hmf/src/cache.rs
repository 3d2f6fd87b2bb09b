//! Disk cache for realized plus-space forms, keyed by a content hash of
//! `(p, poles, prec)`. The cache directory comes from the `HMF_CACHE_DIR`
//! environment variable or an explicit path; without either, caching is
//! disabled and every request recomputes.

use crate::qseries::{rat_str, FracQSeries};
use crate::{Rat, Result};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::PathBuf;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "HMF_CACHE_DIR";

#[derive(Debug, Default)]
pub struct DiskCache {
    dir: Option<PathBuf>,
}

impl DiskCache {
    /// Cache rooted at `HMF_CACHE_DIR` when set, else disabled.
    pub fn from_env() -> Self {
        DiskCache { dir: std::env::var_os(CACHE_ENV).map(PathBuf::from) }
    }

    pub fn disabled() -> Self {
        DiskCache { dir: None }
    }

    pub fn at(dir: PathBuf) -> Self {
        DiskCache { dir: Some(dir) }
    }

    pub fn is_enabled(&self) -> bool {
        self.dir.is_some()
    }

    /// Content hash of a realization request.
    pub fn realize_key(p: u64, poles: &BTreeMap<u64, Rat>, prec: i64) -> String {
        let mut h = Sha256::new();
        h.update(format!("realize p={p} prec={prec}"));
        for (n, c) in poles {
            h.update(format!(" {}:{}", n, rat_str(c)));
        }
        hex(&h.finalize())
    }

    pub fn load(&self, key: &str) -> Option<FracQSeries> {
        let dir = self.dir.as_ref()?;
        let path = dir.join(format!("{key}.qs"));
        let text = std::fs::read_to_string(path).ok()?;
        FracQSeries::from_text(&text).ok()
    }

    pub fn store(&self, key: &str, series: &FracQSeries) -> Result<()> {
        let Some(dir) = self.dir.as_ref() else {
            return Ok(());
        };
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{key}.qs"));
        std::fs::write(path, series.to_text())?;
        Ok(())
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Short content hash used in provenance headers.
pub fn short_hash(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    hex(&h.finalize())[..16].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat_i64;

    #[test]
    fn key_is_stable_and_distinct() {
        let mut poles = BTreeMap::new();
        poles.insert(4u64, rat_i64(2));
        poles.insert(1u64, rat_i64(6));
        let k1 = DiskCache::realize_key(29, &poles, 50);
        let k2 = DiskCache::realize_key(29, &poles, 50);
        assert_eq!(k1, k2);
        let k3 = DiskCache::realize_key(29, &poles, 51);
        assert_ne!(k1, k3);
    }

    #[test]
    fn store_and_load_roundtrip() {
        let dir = std::env::temp_dir().join(format!("hmf-cache-test-{}", std::process::id()));
        let cache = DiskCache::at(dir.clone());
        let s = FracQSeries::from_int_terms(vec![(-1, rat_i64(2)), (0, rat_i64(10))], rat_i64(9));
        cache.store("abc", &s).unwrap();
        assert_eq!(cache.load("abc").unwrap(), s);
        std::fs::remove_dir_all(dir).ok();
    }
}
