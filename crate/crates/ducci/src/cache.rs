//! Append-only JSON-lines store of `(n, m) -> (L, P)`.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use ducci_core::{max_period, MaxPeriodRecord, Params};
use serde::{Deserialize, Serialize};

pub const DEFAULT_CACHE_PATH: &str = "ducci-cache.jsonl";

// fields in key order so each line comes out sorted
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct Line {
    #[serde(rename = "L")]
    len: u64,
    #[serde(rename = "P")]
    period: u64,
    m: u64,
    n: usize,
}

#[derive(Debug, Clone)]
pub struct Cache {
    path: PathBuf,
}

impl Cache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Cache { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// First stored record for `params`. A missing file or malformed lines
    /// are treated as absent.
    pub fn lookup(&self, params: Params) -> io::Result<Option<MaxPeriodRecord>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e),
        };
        for line in BufReader::new(file).lines() {
            let line = line?;
            let Ok(rec) = serde_json::from_str::<Line>(&line) else { continue };
            if rec.n == params.n() && rec.m == params.m() && rec.period > 0 {
                return Ok(Some(MaxPeriodRecord { n: rec.n, m: rec.m, len: rec.len, period: rec.period }));
            }
        }
        Ok(None)
    }

    /// Appends one record as a single write.
    pub fn store(&self, rec: &MaxPeriodRecord) -> io::Result<()> {
        let line = Line { len: rec.len, period: rec.period, m: rec.m, n: rec.n };
        let mut text = serde_json::to_string(&line).map_err(io::Error::other)?;
        text.push('\n');
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        file.write_all(text.as_bytes())
    }
}

/// `max_period` through an optional cache: read first, compute on a miss,
/// then append.
pub fn cached_max_period(cache: Option<&Cache>, params: Params, budget: u64) -> ducci_core::Result<MaxPeriodRecord> {
    if let Some(cache) = cache {
        if let Ok(Some(rec)) = cache.lookup(params) {
            return Ok(rec);
        }
    }
    let rec = max_period(params, budget)?;
    if let Some(cache) = cache {
        // write failures are not fatal
        let _ = cache.store(&rec);
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ducci_core::DEFAULT_STEP_BUDGET;

    #[test]
    fn round_trip_and_sorted_keys() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path().join("c.jsonl"));
        let p = Params::new(5, 7).unwrap();
        assert_eq!(cache.lookup(p).unwrap(), None);
        let rec = cached_max_period(Some(&cache), p, DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!((rec.len, rec.period), (0, 240));
        let text = std::fs::read_to_string(cache.path()).unwrap();
        assert_eq!(text, "{\"L\":0,\"P\":240,\"m\":7,\"n\":5}\n");
        assert_eq!(cache.lookup(p).unwrap(), Some(rec));
        // a hit does not append
        cached_max_period(Some(&cache), p, DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!(std::fs::read_to_string(cache.path()).unwrap().lines().count(), 1);
    }

    #[test]
    fn malformed_lines_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        std::fs::write(&path, "garbage\n{\"n\":3}\n{\"L\":1,\"P\":6,\"m\":4,\"n\":3}\n").unwrap();
        let cache = Cache::new(&path);
        let rec = cache.lookup(Params::new(3, 4).unwrap()).unwrap().unwrap();
        assert_eq!((rec.len, rec.period), (1, 6));
        assert_eq!(cache.lookup(Params::new(3, 5).unwrap()).unwrap(), None);
    }

    #[test]
    fn recomputation_matches_cache() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path().join("c.jsonl"));
        for (n, m) in [(3usize, 4u64), (7, 7), (5, 19)] {
            let p = Params::new(n, m).unwrap();
            let first = cached_max_period(Some(&cache), p, DEFAULT_STEP_BUDGET).unwrap();
            assert_eq!(first, max_period(p, DEFAULT_STEP_BUDGET).unwrap());
            assert_eq!(cache.lookup(p).unwrap(), Some(first));
        }
    }
}
