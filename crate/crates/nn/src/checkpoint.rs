//! Checkpoint files: named f64 arrays plus a step counter, bit-exact on
//! round trip.
//!
//! Layout (all little-endian):
//! `magic "CKP1" | u32 version | u64 step | u32 n_entries |`
//! per entry: `u32 name_len | name bytes | u64 array_len | f64 data... | u32 crc`.

use crate::error::NnError;
use offdyn_core::checksum::crc32;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"CKP1";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub step: u64,
    pub entries: Vec<(String, Vec<f64>)>,
}

impl Checkpoint {
    pub fn new(step: u64) -> Self {
        Checkpoint { step, entries: Vec::new() }
    }

    pub fn push(&mut self, name: &str, values: &[f64]) {
        self.entries.push((name.to_owned(), values.to_vec()));
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Like [`Checkpoint::get`] but demands presence and exact length.
    pub fn take_into(&self, name: &str, dst: &mut [f64]) -> Result<(), NnError> {
        let src = self
            .get(name)
            .ok_or_else(|| NnError::SchemaMismatch(format!("missing entry `{name}`")))?;
        if src.len() != dst.len() {
            return Err(NnError::SchemaMismatch(format!(
                "entry `{name}`: expected {} values, found {}",
                dst.len(),
                src.len()
            )));
        }
        dst.copy_from_slice(src);
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), NnError> {
        let mut buf: Vec<u8> = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.extend_from_slice(&self.step.to_le_bytes());
        buf.extend_from_slice(&(self.entries.len() as u32).to_le_bytes());
        for (name, values) in &self.entries {
            buf.extend_from_slice(&(name.len() as u32).to_le_bytes());
            buf.extend_from_slice(name.as_bytes());
            buf.extend_from_slice(&(values.len() as u64).to_le_bytes());
            let mut bytes = Vec::with_capacity(values.len() * 8);
            for v in values {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            buf.extend_from_slice(&crc32(&bytes).to_le_bytes());
            buf.extend_from_slice(&bytes);
        }
        let mut file = std::fs::File::create(path)?;
        file.write_all(&buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NnError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut cur = Cursor { bytes: &bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(NnError::CorruptFile("bad magic".into()));
        }
        let version = cur.u32()?;
        if version != VERSION {
            return Err(NnError::SchemaMismatch(format!("unsupported version {version}")));
        }
        let step = cur.u64()?;
        let n = cur.u32()? as usize;
        let mut entries = Vec::with_capacity(n);
        for _ in 0..n {
            let name_len = cur.u32()? as usize;
            let name = String::from_utf8(cur.take(name_len)?.to_vec())
                .map_err(|_| NnError::CorruptFile("entry name is not utf-8".into()))?;
            let len = cur.u64()? as usize;
            let crc = cur.u32()?;
            let data = cur.take(len * 8)?;
            if crc32(data) != crc {
                return Err(NnError::CorruptFile(format!("checksum mismatch in `{name}`")));
            }
            let values: Vec<f64> = data
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            entries.push((name, values));
        }
        Ok(Checkpoint { step, entries })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], NnError> {
        if self.pos + n > self.bytes.len() {
            return Err(NnError::CorruptFile("truncated file".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, NnError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, NnError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let mut ck = Checkpoint::new(12345);
        ck.push("actor", &[0.1, -0.2, 3.0e-17, f64::MIN_POSITIVE]);
        ck.push("critic.q1", &[1.0; 64]);
        ck.save(&path).unwrap();
        let loaded = Checkpoint::load(&path).unwrap();
        assert_eq!(loaded, ck);
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let mut ck = Checkpoint::new(1);
        ck.push("actor", &[0.5; 32]);
        ck.save(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 9]).unwrap();
        assert!(matches!(Checkpoint::load(&path), Err(NnError::CorruptFile(_))));
    }

    #[test]
    fn bitflip_fails_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let mut ck = Checkpoint::new(1);
        ck.push("actor", &[0.5; 32]);
        ck.save(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        let n = bytes.len();
        bytes[n - 3] ^= 0x40;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(Checkpoint::load(&path), Err(NnError::CorruptFile(_))));
    }
}
