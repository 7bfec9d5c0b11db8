//! Trace cache: an ASCII CSV of [`TraceRecord`]s closed by a checksum line
//! `#sha256=<hex>` over every preceding byte.

use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{SlotKey, TraceRecord};
use crate::error::{Error, Result};

pub const HEADER: &str = "surface,p,f,index,norm,tags,trace_num,trace_den";
const CHECKSUM_PREFIX: &str = "#sha256=";

pub fn format_record(r: &TraceRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.surface,
        r.slot.p,
        r.slot.f,
        r.slot.index,
        r.slot.norm,
        r.tags_joined(),
        r.num,
        r.den
    )
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{:02x}", b)).collect()
}

fn corrupt(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::CorruptCache {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

fn parse_record(path: &Path, line_no: usize, line: &str) -> Result<TraceRecord> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 8 {
        return Err(corrupt(path, line_no, format!("expected 8 fields, found {}", fields.len())));
    }
    let num = |i: usize| -> Result<i64> {
        fields[i]
            .parse::<i64>()
            .map_err(|_| corrupt(path, line_no, format!("field {} is not an integer: {:?}", i + 1, fields[i])))
    };
    let slot = SlotKey {
        p: num(1)? as u64,
        f: num(2)? as u32,
        index: num(3)? as usize,
        norm: num(4)? as u64,
    };
    if slot.p < 2 || slot.f == 0 || slot.p.checked_pow(slot.f) != Some(slot.norm) {
        return Err(corrupt(path, line_no, "norm is not p^f"));
    }
    let tags: BTreeSet<String> = if fields[5].is_empty() {
        BTreeSet::new()
    } else {
        fields[5].split(';').map(str::to_string).collect()
    };
    let den = num(7)?;
    if den <= 0 {
        return Err(corrupt(path, line_no, "non-positive denominator"));
    }
    Ok(TraceRecord {
        surface: fields[0].to_string(),
        slot,
        tags,
        num: num(6)?,
        den,
    })
}

/// Reads and validates a cache file.
pub fn read_cache(path: &Path) -> Result<Vec<TraceRecord>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_cache(path, &bytes)
}

fn parse_cache(path: &Path, bytes: &[u8]) -> Result<Vec<TraceRecord>> {
    let text = std::str::from_utf8(bytes).map_err(|_| corrupt(path, 0, "not ASCII"))?;
    if !text.is_ascii() {
        return Err(corrupt(path, 0, "not ASCII"));
    }
    let lines: Vec<&str> = text.split_terminator('\n').collect();
    if lines.first() != Some(&HEADER) {
        return Err(corrupt(path, 1, "missing or wrong header"));
    }
    let last = lines.len();
    let sum_line = lines[last - 1];
    let Some(expected) = sum_line.strip_prefix(CHECKSUM_PREFIX) else {
        return Err(corrupt(path, last, "missing checksum line"));
    };
    if !text.ends_with('\n') {
        return Err(corrupt(path, last, "truncated checksum line"));
    }
    let body_len = bytes.len() - sum_line.len() - 1;
    let actual = hex(&Sha256::digest(&bytes[..body_len]));
    if actual != expected {
        return Err(corrupt(path, last, "checksum mismatch"));
    }
    let mut records: Vec<TraceRecord> = Vec::with_capacity(last.saturating_sub(2));
    for (i, line) in lines[1..last - 1].iter().enumerate() {
        let line_no = i + 2;
        let r = parse_record(path, line_no, line)?;
        if let Some(prev) = records.last() {
            if r.surface != prev.surface {
                return Err(corrupt(path, line_no, "mixed surfaces"));
            }
            if r.slot <= prev.slot {
                return Err(corrupt(path, line_no, "records out of order"));
            }
        }
        records.push(r);
    }
    Ok(records)
}

/// Append-only writer that keeps the checksum line current.
pub struct CacheWriter {
    path: PathBuf,
    file: File,
    body_len: u64,
    hasher: Sha256,
    records: Vec<TraceRecord>,
}

impl CacheWriter {
    /// Opens an existing cache for `surface` or creates a fresh one.
    pub fn open(path: &Path, surface: &str) -> Result<Self> {
        let io = |e| Error::io(path, e);
        let existing = path.exists();
        let records = if existing { read_cache(path)? } else { Vec::new() };
        if let Some(r) = records.first() {
            if r.surface != surface {
                return Err(Error::Invalid(format!(
                    "cache {} holds records for {}, not {}",
                    path.display(),
                    r.surface,
                    surface
                )));
            }
        }
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io)?;
        }
        let file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(path)
            .map_err(io)?;
        let mut hasher = Sha256::new();
        let mut body = format!("{}\n", HEADER);
        for r in &records {
            body.push_str(&format_record(r));
            body.push('\n');
        }
        hasher.update(body.as_bytes());
        let mut w = CacheWriter {
            path: path.to_path_buf(),
            file,
            body_len: body.len() as u64,
            hasher,
            records,
        };
        if !existing {
            w.file.write_all(body.as_bytes()).map_err(io)?;
            w.write_checksum()?;
        }
        Ok(w)
    }

    fn write_checksum(&mut self) -> Result<()> {
        let io = |e| Error::io(&self.path, e);
        let line = format!("{}{}\n", CHECKSUM_PREFIX, hex(&self.hasher.clone().finalize()));
        self.file.seek(SeekFrom::Start(self.body_len)).map_err(io)?;
        self.file.write_all(line.as_bytes()).map_err(io)?;
        self.file.set_len(self.body_len + line.len() as u64).map_err(io)?;
        self.file.flush().map_err(io)?;
        Ok(())
    }

    pub fn last_key(&self) -> Option<SlotKey> {
        self.records.last().map(|r| r.slot)
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<TraceRecord> {
        self.records
    }

    /// Appends records (which must extend the current order) and rewrites the checksum.
    pub fn append(&mut self, recs: &[TraceRecord]) -> Result<()> {
        if recs.is_empty() {
            return Ok(());
        }
        let mut chunk = String::new();
        let mut last = self.last_key();
        for r in recs {
            if last.is_some_and(|l| r.slot <= l) {
                return Err(Error::Invalid(format!("record {} out of order", r)));
            }
            last = Some(r.slot);
            chunk.push_str(&format_record(r));
            chunk.push('\n');
        }
        let io = |e| Error::io(&self.path, e);
        self.file.seek(SeekFrom::Start(self.body_len)).map_err(io)?;
        self.file.write_all(chunk.as_bytes()).map_err(io)?;
        self.hasher.update(chunk.as_bytes());
        self.body_len += chunk.len() as u64;
        self.records.extend_from_slice(recs);
        self.write_checksum()
    }
}
