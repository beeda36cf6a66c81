//! On-disk cache for metric tables.
//!
//! Byte layout (all integers little-endian):
//!
//! ```text
//! magic        4 bytes   b"CVLB"
//! version      u32       FORMAT_VERSION
//! id_len       u32       length of the group id in bytes
//! id           id_len    UTF-8 group id
//! horizon      u32
//! layer_count  u32       horizon + 1
//! counts       u64 * layer_count   size of each sphere
//! entries      for each layer r, for each element in ascending key order:
//!                key_len u32, key bytes, length u32 (= r)
//! ```
//!
//! The file is a pure function of `(group id, horizon)`, so a loaded table
//! re-serializes to the same bytes as a freshly computed one.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::metric::{bfs_metric, MetricTable};

pub const MAGIC: &[u8; 4] = b"CVLB";
pub const FORMAT_VERSION: u32 = 1;
pub const CACHE_DIR_ENV: &str = "CURVLAB_CACHE_DIR";

pub fn cache_file_name(group_id: &str, horizon: u32) -> String {
    let safe: String = group_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    format!("{safe}-h{horizon}.cvlb")
}

pub fn to_bytes<G: Group>(group: &G, table: &MetricTable<G>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    let id = table.group_id().as_bytes();
    out.extend_from_slice(&(id.len() as u32).to_le_bytes());
    out.extend_from_slice(id);
    out.extend_from_slice(&table.horizon().to_le_bytes());
    out.extend_from_slice(&(table.layers().len() as u32).to_le_bytes());
    for layer in table.layers() {
        out.extend_from_slice(&(layer.len() as u64).to_le_bytes());
    }
    for (r, layer) in table.layers().iter().enumerate() {
        for x in layer {
            let key = group.encode(x);
            out.extend_from_slice(&(key.len() as u32).to_le_bytes());
            out.extend_from_slice(&key);
            out.extend_from_slice(&(r as u32).to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() < n {
            return Err(Error::CacheFormat("truncated file".into()));
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn from_bytes<G: Group>(group: &G, bytes: &[u8]) -> Result<MetricTable<G>> {
    let mut rd = Reader { bytes };
    if rd.take(4)? != MAGIC {
        return Err(Error::CacheFormat("bad magic".into()));
    }
    let version = rd.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::CacheFormat(format!(
            "unsupported version {version}"
        )));
    }
    let id_len = rd.u32()? as usize;
    let id = std::str::from_utf8(rd.take(id_len)?)
        .map_err(|_| Error::CacheFormat("group id is not UTF-8".into()))?;
    if id != group.id() {
        return Err(Error::CacheFormat(format!(
            "cache is for group {id}, not {}",
            group.id()
        )));
    }
    let horizon = rd.u32()?;
    let layer_count = rd.u32()? as usize;
    if layer_count != horizon as usize + 1 {
        return Err(Error::CacheFormat("layer count does not match horizon".into()));
    }
    let counts = (0..layer_count)
        .map(|_| rd.u64())
        .collect::<Result<Vec<_>>>()?;
    let mut layers = Vec::with_capacity(layer_count);
    for (r, &count) in counts.iter().enumerate() {
        let mut layer = Vec::with_capacity(count as usize);
        let mut last: Option<&[u8]> = None;
        for _ in 0..count {
            let key_len = rd.u32()? as usize;
            let key = rd.take(key_len)?;
            if rd.u32()? as usize != r {
                return Err(Error::CacheFormat("entry length does not match its layer".into()));
            }
            if last.is_some_and(|prev| prev >= key) {
                return Err(Error::CacheFormat("keys are not strictly ascending".into()));
            }
            last = Some(key);
            let x = group
                .decode(key)
                .ok_or_else(|| Error::CacheFormat("undecodable element key".into()))?;
            layer.push(x);
        }
        layers.push(layer);
    }
    if !rd.bytes.is_empty() {
        return Err(Error::CacheFormat("trailing bytes".into()));
    }
    Ok(MetricTable::from_layers(group, horizon, layers))
}

pub fn write_cache<G: Group>(group: &G, table: &MetricTable<G>, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        w.write_all(&to_bytes(group, table))?;
        w.flush()?;
    }
    fs::rename(tmp, path)?;
    Ok(())
}

pub fn read_cache<G: Group>(group: &G, path: &Path) -> Result<MetricTable<G>> {
    from_bytes(group, &fs::read(path)?)
}

/// Loads the table for `(group, horizon)` from `dir`, building and storing
/// it on a miss. A corrupt cache file is rebuilt.
pub fn cached_metric<G: Group>(
    group: &G,
    horizon: u32,
    budget: usize,
    dir: &Path,
) -> Result<MetricTable<G>> {
    let path: PathBuf = dir.join(cache_file_name(&group.id(), horizon));
    if path.exists() {
        if let Ok(table) = read_cache(group, &path) {
            return Ok(table);
        }
    }
    let table = bfs_metric(group, horizon, budget)?;
    write_cache(group, &table, &path)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{make_free, make_s3};
    use crate::metric::DEFAULT_BUDGET;

    #[test]
    fn round_trip_is_bit_identical() {
        let f2 = make_free(2);
        let table = bfs_metric(&f2, 4, DEFAULT_BUDGET).unwrap();
        let bytes = to_bytes(&f2, &table);
        let loaded = from_bytes(&f2, &bytes).unwrap();
        assert_eq!(loaded, table);
        assert_eq!(to_bytes(&f2, &loaded), bytes);
    }

    #[test]
    fn rejects_other_group_and_corruption() {
        let f2 = make_free(2);
        let table = bfs_metric(&f2, 2, DEFAULT_BUDGET).unwrap();
        let bytes = to_bytes(&f2, &table);
        assert!(from_bytes(&make_s3(), &bytes).is_err());
        assert!(from_bytes(&f2, &bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(from_bytes(&f2, &bad).is_err());
    }

    #[test]
    fn cached_metric_reuses_file() {
        let dir = tempfile::tempdir().unwrap();
        let f2 = make_free(2);
        let first = cached_metric(&f2, 3, DEFAULT_BUDGET, dir.path()).unwrap();
        let path = dir.path().join(cache_file_name("F2", 3));
        assert!(path.exists());
        let second = cached_metric(&f2, 3, DEFAULT_BUDGET, dir.path()).unwrap();
        assert_eq!(first, second);
        assert_eq!(fs::read(&path).unwrap(), to_bytes(&f2, &first));
    }
}
