use std::path::{Path, PathBuf};

use gmtc_core::corpus::{load_manifest_csv, Manifest};
use gmtc_core::dsp::{cache_read, FeatureMatrix};
use gmtc_core::trainer::{parse_run_config, TrainConfig};
use gmtc_core::model::ModelConfig;
use gmtc_core::kv::KvText;
use gmtc_core::{Error, Result};

/// `<cache>.manifest.csv`, written next to every feature cache.
pub fn sidecar_manifest(cache: &Path) -> PathBuf {
    let mut name = cache.as_os_str().to_owned();
    name.push(".manifest.csv");
    PathBuf::from(name)
}

pub fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    write(path, serde_json::to_string_pretty(value)?)
}

/// Feature records and the manifest they were extracted from, index-aligned.
pub fn load_features(cache: &Path) -> Result<(Vec<FeatureMatrix>, Manifest)> {
    let features = cache_read(cache)?;
    let manifest = load_manifest_csv(&sidecar_manifest(cache), None)?;
    if features.len() != manifest.len() {
        return Err(Error::Data(format!(
            "{} holds {} records but its manifest lists {}",
            cache.display(),
            features.len(),
            manifest.len()
        )));
    }
    Ok((features, manifest))
}

/// Model and training configuration. Unset `n_classes` and `seq_len`
/// follow the data.
pub fn load_run_config(path: Option<&Path>, n_classes: usize, seq_len: usize) -> Result<(ModelConfig, TrainConfig)> {
    let mut text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        None => String::new(),
    };
    let kv = KvText::parse(&text)?;
    if kv.raw("n_classes").is_none() {
        text.push_str(&format!("\nn_classes={}\n", n_classes));
    }
    if kv.raw("seq_len").is_none() {
        text.push_str(&format!("\nseq_len={}\n", seq_len));
    }
    parse_run_config(&text)
}
