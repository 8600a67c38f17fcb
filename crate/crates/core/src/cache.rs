//! On-disk a_p tables, one text file per curve tag.
//!
//! ```text
//! # curve k=1/1; sha256=<hex digest of the record lines>
//! 5,0
//! 7,-4
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ApCache {
    dir: PathBuf,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoadReport {
    pub records: BTreeMap<u64, i64>,
    /// 1-based line numbers that failed to parse.
    pub rejected: Vec<usize>,
    pub checksum_ok: bool,
}

fn digest(lines: &[&str]) -> String {
    let mut h = Sha256::new();
    for l in lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

pub fn render(tag: &str, records: &BTreeMap<u64, i64>) -> String {
    let body: Vec<String> = records.iter().map(|(p, a)| format!("{},{}", p, a)).collect();
    let refs: Vec<&str> = body.iter().map(|s| s.as_str()).collect();
    let mut out = format!("# curve {}; sha256={}\n", tag, digest(&refs));
    for l in body {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

/// Parses a cache file. A digest mismatch empties the result.
pub fn parse(tag: &str, text: &str) -> Result<LoadReport> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Cache("empty cache file".into()))?;
    let rest = header
        .strip_prefix("# curve ")
        .ok_or_else(|| Error::Cache(format!("bad cache header: {}", header)))?;
    let (htag, sha) = rest
        .split_once("; sha256=")
        .ok_or_else(|| Error::Cache(format!("bad cache header: {}", header)))?;
    if htag != tag {
        return Err(Error::Cache(format!("cache is for {}, wanted {}", htag, tag)));
    }
    let body: Vec<&str> = lines.collect();
    let mut rep = LoadReport { checksum_ok: digest(&body) == sha.trim(), ..Default::default() };
    if !rep.checksum_ok {
        log::warn!("a_p cache for {}: checksum mismatch, ignoring", tag);
        return Ok(rep);
    }
    for (i, l) in body.iter().enumerate() {
        let parsed = l.split_once(',').and_then(|(p, a)| Some((p.trim().parse::<u64>().ok()?, a.trim().parse::<i64>().ok()?)));
        match parsed {
            Some((p, a)) if !rep.records.contains_key(&p) => {
                rep.records.insert(p, a);
            }
            _ => {
                log::warn!("a_p cache for {}: skipping line {}", tag, i + 2);
                rep.rejected.push(i + 2);
            }
        }
    }
    Ok(rep)
}

impl ApCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ApCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, tag: &str) -> PathBuf {
        self.dir.join(format!("{}.ap", tag.replace('/', "_")))
    }

    pub fn load(&self, tag: &str) -> Option<LoadReport> {
        let text = fs::read_to_string(self.path(tag)).ok()?;
        match parse(tag, &text) {
            Ok(r) => Some(r),
            Err(e) => {
                log::warn!("a_p cache for {}: {}", tag, e);
                None
            }
        }
    }

    /// Writes via a temporary file and rename so readers never see a partial table.
    pub fn store(&self, tag: &str, records: &BTreeMap<u64, i64>) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let target = self.path(tag);
        let tmp = target.with_extension(format!("tmp{}", std::process::id()));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(render(tag, records).as_bytes())?;
        drop(f);
        fs::rename(&tmp, &target).map_err(Error::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = ApCache::new(dir.path());
        let recs: BTreeMap<u64, i64> = (1..10_000u64).map(|i| (i, (i as i64 % 17) - 8)).collect();
        c.store("k=1/1", &recs).unwrap();
        let back = c.load("k=1/1").unwrap();
        assert!(back.checksum_ok);
        assert_eq!(back.records, recs);
    }

    #[test]
    fn tampering_is_detected() {
        let mut recs = BTreeMap::new();
        recs.insert(5u64, 0i64);
        recs.insert(7, -4);
        let text = render("k=1/1", &recs).replace("7,-4", "7,-5");
        let rep = parse("k=1/1", &text).unwrap();
        assert!(!rep.checksum_ok);
        assert!(rep.records.is_empty());
    }
}
