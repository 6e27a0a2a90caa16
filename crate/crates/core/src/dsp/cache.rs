//! Binary feature cache.
//!
//! Little-endian layout: `"GMTC"`, `u32` version (1), `u32` record count, then
//! per record `u32` id length, UTF-8 id, `u32` T, `u32` true length, `u32` C,
//! and `T·C` `f32` values row-major.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::dsp::features::FeatureMatrix;
use crate::error::{Error, Result};
use crate::ndcore::Tensor;

const MAGIC: &[u8; 4] = b"GMTC";
const VERSION: u32 = 1;

pub fn encode_cache(features: &[FeatureMatrix]) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(features.len() as u32).to_le_bytes());
    for fm in features {
        let id = fm.clip_id.as_bytes();
        buf.extend_from_slice(&(id.len() as u32).to_le_bytes());
        buf.extend_from_slice(id);
        buf.extend_from_slice(&(fm.frames.rows() as u32).to_le_bytes());
        buf.extend_from_slice(&(fm.true_len as u32).to_le_bytes());
        buf.extend_from_slice(&(fm.frames.cols() as u32).to_le_bytes());
        for v in fm.frames.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    buf
}

pub fn cache_write(path: &Path, features: &[FeatureMatrix]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode_cache(features)).map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn cache_read(path: &Path) -> Result<Vec<FeatureMatrix>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_cache(&bytes).map_err(|msg| Error::format(path, msg))
}

pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(format!("truncated file at byte {}", self.pos)),
        }
    }

    pub(crate) fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn f32s(&mut self, n: usize) -> std::result::Result<Vec<f32>, String> {
        let raw = self.take(n.checked_mul(4).ok_or("size overflow")?)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub(crate) fn string(&mut self) -> std::result::Result<String, String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| "invalid UTF-8 string".to_string())
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos == self.bytes.len()
    }
}

pub fn decode_cache(bytes: &[u8]) -> std::result::Result<Vec<FeatureMatrix>, String> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != MAGIC {
        return Err("bad magic, not a feature cache".into());
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(format!("unsupported cache version {}", version));
    }
    let count = r.u32()? as usize;
    let mut out = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let id = r.string()?;
        let t_len = r.u32()? as usize;
        let true_len = r.u32()? as usize;
        let cols = r.u32()? as usize;
        let data = r.f32s(t_len.checked_mul(cols).ok_or("size overflow")?)?;
        let frames = Tensor::from_vec(&[t_len, cols], data).map_err(|e| format!("{}: {}", id, e))?;
        out.push(FeatureMatrix::new(frames, true_len, id).map_err(|e| e.to_string())?);
    }
    if !r.at_end() {
        return Err("trailing bytes after last record".into());
    }
    Ok(out)
}
