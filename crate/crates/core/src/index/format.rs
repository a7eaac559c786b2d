//! The corpus index and its on-disk encoding.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! "PLIX"  u16 version
//! body:   u32 tau | u64 cap | [u8; 32] hierarchy fingerprint | u64 count
//!         count x (u32 key length | key bytes | f64 fpr | u64 cov), keys sorted
//! u32     CRC-32 of body
//! ```

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use super::aggregate::AggregateMap;
use crate::pattern::{Pattern, TokenizerOptions};

pub const MAGIC: &[u8; 4] = b"PLIX";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum IndexFormatError {
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported index format version {0}, expected {FORMAT_VERSION}")]
    UnsupportedVersion(u16),
    #[error("index file is truncated")]
    Truncated,
    #[error("index checksum mismatch (stored {stored:#010x}, computed {computed:#010x})")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("invalid key in index record {0}")]
    InvalidKey(u64),
    #[error("index keys are not strictly sorted at record {0}")]
    Unsorted(u64),
    #[error("invalid statistics in index record {0}")]
    InvalidEntry(u64),
    #[error("trailing bytes after index records")]
    TrailingBytes,
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexParams {
    pub tau: u32,
    pub cap: u64,
    pub fingerprint: [u8; 32],
}

#[derive(Debug, Clone, Copy)]
pub struct IndexEntry {
    pub fpr: f64,
    pub cov: u64,
}

impl PartialEq for IndexEntry {
    fn eq(&self, other: &Self) -> bool {
        self.fpr.to_bits() == other.fpr.to_bits() && self.cov == other.cov
    }
}

impl Eq for IndexEntry {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusIndex {
    pub params: IndexParams,
    table: HashMap<String, IndexEntry>,
}

impl CorpusIndex {
    pub fn new(params: IndexParams) -> Self {
        CorpusIndex { params, table: HashMap::new() }
    }

    pub fn from_aggregates(params: IndexParams, aggregates: &AggregateMap) -> Self {
        let table = aggregates
            .iter()
            .map(|(k, a)| (k.clone(), IndexEntry { fpr: a.fpr(), cov: a.cov }))
            .collect();
        CorpusIndex { params, table }
    }

    /// Inserts or replaces an entry; used to assemble indexes by hand.
    pub fn insert(&mut self, key: impl Into<String>, entry: IndexEntry) {
        self.table.insert(key.into(), entry);
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn lookup(&self, pattern: &Pattern) -> Option<IndexEntry> {
        self.lookup_key(&pattern.key())
    }

    pub fn lookup_key(&self, key: &str) -> Option<IndexEntry> {
        self.table.get(key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, IndexEntry)> {
        self.table.iter().map(|(k, e)| (k.as_str(), *e))
    }

    /// Entries in key order.
    pub fn sorted(&self) -> Vec<(&str, IndexEntry)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let entries = self.sorted();
        let mut out = Vec::with_capacity(64 + entries.iter().map(|(k, _)| k.len() + 20).sum::<usize>());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        let body_start = out.len();
        out.extend_from_slice(&self.params.tau.to_le_bytes());
        out.extend_from_slice(&self.params.cap.to_le_bytes());
        out.extend_from_slice(&self.params.fingerprint);
        out.extend_from_slice(&(entries.len() as u64).to_le_bytes());
        for (key, e) in entries {
            out.extend_from_slice(&(key.len() as u32).to_le_bytes());
            out.extend_from_slice(key.as_bytes());
            out.extend_from_slice(&e.fpr.to_le_bytes());
            out.extend_from_slice(&e.cov.to_le_bytes());
        }
        let crc = crc32fast::hash(&out[body_start..]);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, IndexFormatError> {
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(IndexFormatError::BadMagic);
        }
        if bytes.len() < 6 {
            return Err(IndexFormatError::Truncated);
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != FORMAT_VERSION {
            return Err(IndexFormatError::UnsupportedVersion(version));
        }
        if bytes.len() < 6 + 4 {
            return Err(IndexFormatError::Truncated);
        }
        let (body, crc) = bytes[6..].split_at(bytes.len() - 10);
        let stored = u32::from_le_bytes(crc.try_into().expect("4 bytes"));
        let computed = crc32fast::hash(body);
        if stored != computed {
            return Err(IndexFormatError::ChecksumMismatch { stored, computed });
        }

        let mut r = Reader { buf: body };
        let tau = u32::from_le_bytes(r.array()?);
        let cap = u64::from_le_bytes(r.array()?);
        let fingerprint: [u8; 32] = r.array()?;
        let count = u64::from_le_bytes(r.array()?);
        let mut table = HashMap::with_capacity(count.min(1 << 24) as usize);
        let mut previous: Option<&str> = None;
        for i in 0..count {
            let len = u32::from_le_bytes(r.array()?) as usize;
            let key = std::str::from_utf8(r.take(len)?).map_err(|_| IndexFormatError::InvalidKey(i))?;
            let canonical = Pattern::parse_with(key, TokenizerOptions::default())
                .map(|p| p.key() == key)
                .unwrap_or(false);
            if !canonical {
                return Err(IndexFormatError::InvalidKey(i));
            }
            if previous.is_some_and(|p| p >= key) {
                return Err(IndexFormatError::Unsorted(i));
            }
            previous = Some(key);
            let fpr = f64::from_le_bytes(r.array()?);
            let cov = u64::from_le_bytes(r.array()?);
            if !(0.0..=1.0).contains(&fpr) || cov == 0 {
                return Err(IndexFormatError::InvalidEntry(i));
            }
            table.insert(key.to_owned(), IndexEntry { fpr, cov });
        }
        if !r.buf.is_empty() {
            return Err(IndexFormatError::TrailingBytes);
        }
        Ok(CorpusIndex { params: IndexParams { tau, cap, fingerprint }, table })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), IndexFormatError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IndexFormatError> {
        Self::from_bytes(&fs::read(path)?)
    }
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IndexFormatError> {
        if self.buf.len() < n {
            return Err(IndexFormatError::Truncated);
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], IndexFormatError> {
        Ok(self.take(N)?.try_into().expect("exact length"))
    }
}
