//! Immutable per-model embedding matrix and its binary file format.
//!
//! Layout (little-endian, no padding):
//!
//! ```text
//! "MLMV" | version u32 | dim u32 | count u64 | name_len u16 | name bytes
//!        | flags u8 (bit0 = normalized) | count x sid u64 | count x dim x f32
//! ```

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use super::topk::SidSet;
use super::IndexError;
use crate::embed::{embed_batch, normalize, Registry};
use crate::ingest::Corpus;

pub const MAGIC: &[u8; 4] = b"MLMV";
pub const FORMAT_VERSION: u32 = 1;

const FLAG_NORMALIZED: u8 = 0b1;
const UNIT_NORM_TOLERANCE: f64 = 1e-5;
const EMBED_BATCH: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct VectorStore {
    model_abbr: String,
    dim: usize,
    normalized: bool,
    sids: Vec<u64>,
    data: Vec<f32>,
}

impl VectorStore {
    /// Assembles a store, checking every structural invariant.
    pub fn from_parts(
        model_abbr: impl Into<String>,
        dim: usize,
        normalized: bool,
        sids: Vec<u64>,
        data: Vec<f32>,
    ) -> Result<Self, IndexError> {
        let model_abbr = model_abbr.into();
        if dim == 0 || dim > u32::MAX as usize {
            return Err(IndexError::Invalid(format!("dimension {dim} out of range")));
        }
        if model_abbr.len() > u16::MAX as usize {
            return Err(IndexError::Invalid("model name longer than 65535 bytes".into()));
        }
        if data.len() != sids.len() * dim {
            return Err(IndexError::Invalid(format!(
                "{} values for {} rows of dimension {dim}",
                data.len(),
                sids.len()
            )));
        }
        if let Some(i) = sids.windows(2).position(|w| w[0] >= w[1]) {
            return Err(IndexError::Invalid(format!("sids not strictly increasing at row {}", i + 1)));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(IndexError::Invalid(format!("non-finite value in row {}", i / dim)));
        }
        let store = Self {
            model_abbr,
            dim,
            normalized,
            sids,
            data,
        };
        if normalized {
            if let Some(row) = store.first_non_unit_row() {
                return Err(IndexError::Invalid(format!("row {row} is not unit norm")));
            }
        }
        Ok(store)
    }

    pub fn empty(model_abbr: impl Into<String>, dim: usize, normalized: bool) -> Result<Self, IndexError> {
        Self::from_parts(model_abbr, dim, normalized, Vec::new(), Vec::new())
    }

    fn first_non_unit_row(&self) -> Option<usize> {
        (0..self.count()).find(|&i| {
            let n: f64 = self.row(i).iter().map(|&v| f64::from(v) * f64::from(v)).sum();
            (n.sqrt() - 1.0).abs() > UNIT_NORM_TOLERANCE
        })
    }

    pub fn model_abbr(&self) -> &str {
        &self.model_abbr
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.sids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sids.is_empty()
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn sids(&self) -> &[u64] {
        &self.sids
    }

    pub fn sid_set(&self) -> SidSet {
        SidSet::from_sorted_unchecked(self.sids.clone())
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_of(&self, sid: u64) -> Option<usize> {
        self.sids.binary_search(&sid).ok()
    }

    pub fn vector_of(&self, sid: u64) -> Option<&[f32]> {
        self.row_of(sid).map(|i| self.row(i))
    }

    /// Returns the store restricted to `sids` (which must all be present).
    pub fn subset(&self, sids: &SidSet) -> Result<Self, IndexError> {
        let mut data = Vec::with_capacity(sids.len() * self.dim);
        for &sid in sids.as_slice() {
            let row = self.row_of(sid).ok_or(IndexError::UnknownSid(sid))?;
            data.extend_from_slice(self.row(row));
        }
        Ok(Self {
            model_abbr: self.model_abbr.clone(),
            dim: self.dim,
            normalized: self.normalized,
            sids: sids.as_slice().to_vec(),
            data,
        })
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.count() as u64).to_le_bytes())?;
        w.write_all(&(self.model_abbr.len() as u16).to_le_bytes())?;
        w.write_all(self.model_abbr.as_bytes())?;
        w.write_all(&[if self.normalized { FLAG_NORMALIZED } else { 0 }])?;
        for sid in &self.sids {
            w.write_all(&sid.to_le_bytes())?;
        }
        for chunk in self.data.chunks(8192) {
            let bytes: Vec<u8> = chunk.iter().flat_map(|v| v.to_le_bytes()).collect();
            w.write_all(&bytes)?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(23 + self.model_abbr.len() + self.sids.len() * 8 + self.data.len() * 4);
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, IndexError> {
        let mut r = Reader { bytes, offset: 0 };
        let magic = r.take(4, "magic")?;
        if magic != MAGIC {
            return Err(IndexError::BadMagic {
                offset: 0,
                found: magic.to_vec(),
            });
        }
        let version_at = r.offset as u64;
        let version = r.u32("version")?;
        if version != FORMAT_VERSION {
            return Err(IndexError::UnsupportedVersion {
                offset: version_at,
                version,
            });
        }
        let dim_at = r.offset as u64;
        let dim = r.u32("dim")? as usize;
        if dim == 0 {
            return Err(IndexError::Corrupt {
                offset: dim_at,
                detail: "dimension is zero".into(),
            });
        }
        let count = r.u64("count")?;
        let name_len = r.u16("name_len")? as usize;
        let name_at = r.offset as u64;
        let name = std::str::from_utf8(r.take(name_len, "model name")?)
            .map_err(|e| IndexError::Corrupt {
                offset: name_at + e.valid_up_to() as u64,
                detail: "model name is not UTF-8".into(),
            })?
            .to_string();
        let flags_at = r.offset as u64;
        let flags = r.take(1, "flags")?[0];
        if flags & !FLAG_NORMALIZED != 0 {
            return Err(IndexError::Corrupt {
                offset: flags_at,
                detail: format!("unknown flag bits {flags:#010b}"),
            });
        }

        let sids_at = r.offset;
        let count_usize = usize::try_from(count).map_err(|_| IndexError::Corrupt {
            offset: 12,
            detail: format!("count {count} too large"),
        })?;
        let sid_bytes = count_usize.checked_mul(8).ok_or(IndexError::Corrupt {
            offset: 12,
            detail: format!("count {count} too large"),
        })?;
        let raw_sids = r.take(sid_bytes, "sids")?;
        let sids: Vec<u64> = raw_sids
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        if let Some(i) = sids.windows(2).position(|w| w[0] >= w[1]) {
            return Err(IndexError::Corrupt {
                offset: (sids_at + (i + 1) * 8) as u64,
                detail: format!("sid {} does not increase", sids[i + 1]),
            });
        }

        let data_at = r.offset;
        let value_bytes = count_usize
            .checked_mul(dim)
            .and_then(|n| n.checked_mul(4))
            .ok_or(IndexError::Corrupt {
                offset: 12,
                detail: format!("count {count} x dim {dim} too large"),
            })?;
        let raw = r.take(value_bytes, "vectors")?;
        let data: Vec<f32> = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("chunk of 4")))
            .collect();
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(IndexError::Corrupt {
                offset: (data_at + i * 4) as u64,
                detail: "non-finite vector component".into(),
            });
        }
        if r.offset != bytes.len() {
            return Err(IndexError::TrailingBytes {
                offset: r.offset as u64,
                extra: (bytes.len() - r.offset) as u64,
            });
        }
        let store = Self {
            model_abbr: name,
            dim,
            normalized: flags & FLAG_NORMALIZED != 0,
            sids,
            data,
        };
        if store.normalized {
            if let Some(row) = store.first_non_unit_row() {
                return Err(IndexError::Corrupt {
                    offset: (data_at + row * dim * 4) as u64,
                    detail: format!("row {row} is flagged normalized but is not unit norm"),
                });
            }
        }
        Ok(store)
    }

    pub fn write(&self, path: &Path) -> Result<(), IndexError> {
        let io = |source| IndexError::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = fs::File::create(path).map_err(io)?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w).map_err(io)?;
        w.flush().map_err(io)
    }

    pub fn read(path: &Path) -> Result<Self, IndexError> {
        let bytes = fs::read(path).map_err(|source| IndexError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_bytes(&bytes)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], IndexError> {
        let available = self.bytes.len() - self.offset;
        if n > available {
            return Err(IndexError::Truncated {
                what,
                offset: self.offset as u64,
                needed: n as u64,
                available: available as u64,
            });
        }
        let out = &self.bytes[self.offset..self.offset + n];
        self.offset += n;
        Ok(out)
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, IndexError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, IndexError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64, IndexError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }
}

/// Embeds the given corpus sentences with one model, one row per sid in
/// ascending sid order. With `normalize` every row is scaled to unit norm.
pub fn build_store(
    corpus: &Corpus,
    sids: &SidSet,
    registry: &Registry,
    model_abbr: &str,
    normalize_rows: bool,
) -> Result<VectorStore, IndexError> {
    let spec = registry.get(model_abbr)?.spec.clone();
    let texts: Vec<String> = sids
        .as_slice()
        .iter()
        .map(|&sid| {
            corpus
                .record(sid)
                .map(|r| r.text.clone())
                .ok_or(IndexError::UnknownSid(sid))
        })
        .collect::<Result<_, _>>()?;

    let batches: Vec<Vec<crate::embed::Vector>> = texts
        .par_chunks(EMBED_BATCH)
        .map(|batch| embed_batch(registry, model_abbr, batch))
        .collect::<Result<_, _>>()?;

    let mut data = Vec::with_capacity(texts.len() * spec.dim);
    for v in batches.into_iter().flatten() {
        let v = if normalize_rows { normalize(&v)? } else { v };
        data.extend_from_slice(v.as_slice());
    }
    VectorStore::from_parts(model_abbr, spec.dim, normalize_rows, sids.as_slice().to_vec(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VectorStore {
        VectorStore::from_parts(
            "PSTM_1",
            3,
            true,
            vec![2, 5, 9],
            vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn exact_layout() {
        let store = VectorStore::from_parts("AB", 2, false, vec![7], vec![1.5, -2.0]).unwrap();
        let bytes = store.to_bytes();
        let mut expected = b"MLMV".to_vec();
        expected.extend(1u32.to_le_bytes());
        expected.extend(2u32.to_le_bytes());
        expected.extend(1u64.to_le_bytes());
        expected.extend(2u16.to_le_bytes());
        expected.extend(b"AB");
        expected.push(0);
        expected.extend(7u64.to_le_bytes());
        expected.extend(1.5f32.to_le_bytes());
        expected.extend((-2.0f32).to_le_bytes());
        assert_eq!(bytes, expected);
    }

    #[test]
    fn roundtrip() {
        let store = sample();
        let bytes = store.to_bytes();
        let back = VectorStore::from_bytes(&bytes).unwrap();
        assert_eq!(back, store);
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn bad_magic() {
        let mut bytes = sample().to_bytes();
        bytes[0] = b'X';
        match VectorStore::from_bytes(&bytes) {
            Err(IndexError::BadMagic { offset: 0, found }) => assert_eq!(found, b"XLMV"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truncation_reports_offset() {
        let bytes = sample().to_bytes();
        let header = 4 + 4 + 4 + 8 + 2 + 6 + 1;
        match VectorStore::from_bytes(&bytes[..bytes.len() - 1]) {
            Err(IndexError::Truncated {
                what: "vectors",
                offset,
                needed: 36,
                available: 35,
            }) => assert_eq!(offset, (header + 24) as u64),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            VectorStore::from_bytes(&bytes[..10]),
            Err(IndexError::Truncated { what: "dim", offset: 8, .. })
        ));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(
            VectorStore::from_bytes(&extra),
            Err(IndexError::TrailingBytes { extra: 1, .. })
        ));
    }

    #[test]
    fn corrupt_contents() {
        let bytes = sample().to_bytes();
        let header = 4 + 4 + 4 + 8 + 2 + 6 + 1;
        let mut swapped = bytes.clone();
        swapped[header + 8..header + 16].copy_from_slice(&1u64.to_le_bytes());
        assert!(matches!(
            VectorStore::from_bytes(&swapped),
            Err(IndexError::Corrupt { offset, .. }) if offset == (header + 8) as u64
        ));
        let mut version = bytes.clone();
        version[4] = 2;
        assert!(matches!(
            VectorStore::from_bytes(&version),
            Err(IndexError::UnsupportedVersion { offset: 4, version: 2 })
        ));
        let mut scaled = bytes;
        let at = header + 24;
        scaled[at..at + 4].copy_from_slice(&2.0f32.to_le_bytes());
        assert!(matches!(VectorStore::from_bytes(&scaled), Err(IndexError::Corrupt { .. })));
    }

    #[test]
    fn from_parts_validation() {
        assert!(VectorStore::from_parts("M", 2, false, vec![1, 1], vec![0.0; 4]).is_err());
        assert!(VectorStore::from_parts("M", 2, false, vec![1], vec![0.0; 3]).is_err());
        assert!(VectorStore::from_parts("M", 0, false, vec![], vec![]).is_err());
        assert!(VectorStore::from_parts("M", 1, false, vec![1], vec![f32::NAN]).is_err());
        assert!(VectorStore::from_parts("M", 1, true, vec![1], vec![0.5]).is_err());
    }

    #[test]
    fn empty_store_roundtrip() {
        let store = VectorStore::empty("PSTM_1", 384, true).unwrap();
        assert_eq!(VectorStore::from_bytes(&store.to_bytes()).unwrap(), store);
    }
}
