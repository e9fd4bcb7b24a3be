//! On-disk cache of computed series, keyed by series name, parameters and
//! truncation order.
//!
//! An entry is trusted only after one randomly chosen coefficient has been
//! recomputed and matched; anything unreadable or inconsistent is discarded
//! and recomputed.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qseries::QSeries;
use crate::strata::StrataError;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Compute(#[from] StrataError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeriesKey {
    pub name: String,
    pub params: Vec<i64>,
}

impl SeriesKey {
    pub fn new(name: &str, params: &[i64]) -> Self {
        Self {
            name: name.to_string(),
            params: params.to_vec(),
        }
    }

    fn file_name(&self, order: usize) -> String {
        let mut s = self.name.clone();
        for p in &self.params {
            s.push('_');
            s.push_str(&p.to_string());
        }
        format!("{s}_N{order}.json")
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: SeriesKey,
    series: QSeries,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// The stored entry was rejected; carries the reason.
    Invalidated(String),
}

pub struct SeriesCache {
    dir: PathBuf,
}

impl SeriesCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CacheError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| CacheError::Io { path: dir.clone(), source })?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &SeriesKey, order: usize) -> PathBuf {
        self.dir.join(key.file_name(order))
    }

    /// Returns the series for `key` at `order`, from disk when a valid entry
    /// exists. `compute(k)` must produce the same series truncated at `k`.
    pub fn get_or_compute<F>(&self, key: &SeriesKey, order: usize, compute: F) -> Result<(QSeries, CacheStatus), CacheError>
    where
        F: Fn(usize) -> Result<QSeries, StrataError>,
    {
        let path = self.path_for(key, order);
        let status = match fs::read_to_string(&path) {
            Err(e) if e.kind() == io::ErrorKind::NotFound => CacheStatus::Miss,
            Err(source) => return Err(CacheError::Io { path, source }),
            Ok(text) => match Self::validate(&text, key, order, &compute)? {
                Ok(series) => return Ok((series, CacheStatus::Hit)),
                Err(reason) => CacheStatus::Invalidated(reason),
            },
        };
        let series = compute(order)?;
        let entry = Entry { key: key.clone(), series };
        let json = serde_json::to_string(&entry).expect("series serialise");
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, json)
            .and_then(|_| fs::rename(&tmp, &path))
            .map_err(|source| CacheError::Io { path: path.clone(), source })?;
        Ok((entry.series, status))
    }

    fn validate<F>(text: &str, key: &SeriesKey, order: usize, compute: &F) -> Result<Result<QSeries, String>, StrataError>
    where
        F: Fn(usize) -> Result<QSeries, StrataError>,
    {
        let entry: Entry = match serde_json::from_str(text) {
            Ok(e) => e,
            Err(e) => return Ok(Err(format!("unreadable entry: {e}"))),
        };
        if &entry.key != key || entry.series.order() != order {
            return Ok(Err("entry does not match its key".to_string()));
        }
        let n = rand::thread_rng().gen_range(0..=order);
        let fresh = compute(n)?;
        if fresh.coeff(n) != entry.series.coeff(n) {
            return Ok(Err(format!("coefficient of q^{n} does not match a fresh computation")));
        }
        Ok(Ok(entry.series))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;
    use crate::qseries::series_y0;

    fn y0(order: usize) -> Result<QSeries, StrataError> {
        Ok(series_y0(order))
    }

    #[test]
    fn miss_then_hit() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SeriesCache::open(dir.path()).unwrap();
        let key = SeriesKey::new("y0", &[]);
        let (s, st) = cache.get_or_compute(&key, 6, y0).unwrap();
        assert_eq!(st, CacheStatus::Miss);
        assert_eq!(s, series_y0(6));
        let (s2, st2) = cache.get_or_compute(&key, 6, y0).unwrap();
        assert_eq!(st2, CacheStatus::Hit);
        assert_eq!(s2, s);
    }

    #[test]
    fn corrupted_entries_are_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SeriesCache::open(dir.path()).unwrap();
        let key = SeriesKey::new("y0", &[]);
        let path = cache.path_for(&key, 4);

        fs::write(&path, "{ not json").unwrap();
        let (s, st) = cache.get_or_compute(&key, 4, y0).unwrap();
        assert!(matches!(st, CacheStatus::Invalidated(_)));
        assert_eq!(s, series_y0(4));

        // Every coefficient wrong, so whichever one is sampled mismatches.
        let bogus = QSeries::from_coeffs(vec![LaurentPoly::t_pow(99); 5], 4);
        let entry = Entry { key: key.clone(), series: bogus };
        fs::write(&path, serde_json::to_string(&entry).unwrap()).unwrap();
        let (s, st) = cache.get_or_compute(&key, 4, y0).unwrap();
        assert!(matches!(st, CacheStatus::Invalidated(_)), "{st:?}");
        assert_eq!(s, series_y0(4));
        assert_eq!(cache.get_or_compute(&key, 4, y0).unwrap().1, CacheStatus::Hit);
    }

    #[test]
    fn keys_are_distinct_files() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SeriesCache::open(dir.path()).unwrap();
        let a = cache.path_for(&SeriesKey::new("closed_b", &[2]), 14);
        let b = cache.path_for(&SeriesKey::new("closed_b", &[3]), 14);
        let c = cache.path_for(&SeriesKey::new("closed_b", &[2]), 13);
        assert!(a != b && a != c);
        assert!(a.ends_with("closed_b_2_N14.json"));
    }
}
