//! Checkpoint container.
//!
//! Little-endian layout: `"GMCK"`, `u32` version, `u32` length + UTF-8
//! canonical configuration text, `u32` tensor count, then per tensor `u32`
//! length + UTF-8 name, `u32` rank, `rank × u32` extents, and `f32` values.
//! Training metadata travels in the configuration text under `meta.` keys.

use std::fs;
use std::path::Path;

use crate::dsp::cache::Reader;
use crate::error::{Error, Result};
use crate::kv::KvText;
use crate::model::config::ModelConfig;
use crate::model::params::ParamStore;
use crate::ndcore::Tensor;

const MAGIC: &[u8; 4] = b"GMCK";
const VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingMeta {
    pub epoch: usize,
    pub best_val_war: f64,
    pub seed: u64,
    pub labels: Vec<String>,
}

impl TrainingMeta {
    fn to_kv(&self) -> KvText {
        let mut kv = KvText::new();
        kv.set("meta.epoch", self.epoch);
        kv.set("meta.best_val_war", self.best_val_war);
        kv.set("meta.seed", self.seed);
        kv.set("meta.labels", self.labels.join(","));
        kv
    }

    fn from_kv(kv: &KvText) -> Result<Self> {
        let labels: String = kv.get_or("meta.labels", String::new())?;
        Ok(TrainingMeta {
            epoch: kv.get_or("meta.epoch", 0)?,
            best_val_war: kv.get_or("meta.best_val_war", 0.0)?,
            seed: kv.get_or("meta.seed", 0)?,
            labels: if labels.is_empty() {
                Vec::new()
            } else {
                labels.split(',').map(str::to_string).collect()
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub config: ModelConfig,
    pub params: ParamStore<f32>,
    pub meta: TrainingMeta,
}

pub fn encode_checkpoint(ckpt: &Checkpoint) -> Result<Vec<u8>> {
    if ckpt.meta.labels.iter().any(|l| l.contains([',', '\n', '\r'])) {
        return Err(Error::InvalidArgument("labels may not contain commas or newlines".into()));
    }
    let mut kv = ckpt.config.to_kv();
    kv.merge(&ckpt.meta.to_kv());
    let text = kv.render();

    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    put_str(&mut buf, &text);
    let named = ckpt.params.named();
    buf.extend_from_slice(&(named.len() as u32).to_le_bytes());
    for (name, t) in named {
        put_str(&mut buf, &name);
        buf.extend_from_slice(&(t.rank() as u32).to_le_bytes());
        for &e in t.shape() {
            buf.extend_from_slice(&(e as u32).to_le_bytes());
        }
        for v in t.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(buf)
}

fn put_str(buf: &mut Vec<u8>, s: &str) {
    buf.extend_from_slice(&(s.len() as u32).to_le_bytes());
    buf.extend_from_slice(s.as_bytes());
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Checkpoint> {
    let fmt = |m: String| Error::Data(m);
    let mut r = Reader::new(bytes);
    if r.take(4).map_err(fmt)? != MAGIC {
        return Err(Error::Data("bad magic, not a checkpoint".into()));
    }
    let version = r.u32().map_err(fmt)?;
    if version != VERSION {
        return Err(Error::Data(format!("unsupported checkpoint version {}", version)));
    }
    let kv = KvText::parse(&r.string().map_err(fmt)?)?;
    let config = ModelConfig::from_kv(&kv)?;
    let meta = TrainingMeta::from_kv(&kv)?;
    let count = r.u32().map_err(fmt)? as usize;
    let mut named = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let name = r.string().map_err(fmt)?;
        let rank = r.u32().map_err(fmt)? as usize;
        if !(1..=3).contains(&rank) {
            return Err(Error::Data(format!("{}: invalid rank {}", name, rank)));
        }
        let shape = (0..rank)
            .map(|_| r.u32().map(|v| v as usize))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(fmt)?;
        let n = shape.iter().try_fold(1usize, |a, &e| a.checked_mul(e)).ok_or_else(|| Error::Data("size overflow".into()))?;
        let data = r.f32s(n).map_err(fmt)?;
        named.push((name, Tensor::from_vec(&shape, data)?));
    }
    if !r.at_end() {
        return Err(Error::Data("trailing bytes after last tensor".into()));
    }
    let params = ParamStore::from_named(&config, named)?;
    Ok(Checkpoint { config, params, meta })
}

pub fn checkpoint_save(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    fs::write(path, encode_checkpoint(ckpt)?).map_err(|e| Error::io(path, e))
}

pub fn checkpoint_load(path: &Path) -> Result<Checkpoint> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes).map_err(|e| match e {
        Error::Data(m) | Error::Shape(m) | Error::Config(m) => Error::format(path, m),
        other => other,
    })
}
