use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{forward_trace, Checkpoint};
use crate::ndcore::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapSource {
    Input,
    /// 1-based block index.
    Gcb(usize),
    GtcmOutput,
}

impl fmt::Display for MapSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSource::Input => f.write_str("input"),
            MapSource::Gcb(i) => write!(f, "gcb{}", i),
            MapSource::GtcmOutput => f.write_str("gtcm_output"),
        }
    }
}

/// A `T × C` activation map with its min-max scaled 8-bit view.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMap {
    pub source: MapSource,
    pub values: Tensor<f32>,
    /// Row-major `T × C`, same layout as `values`.
    pub normalized: Vec<u8>,
}

/// Min-max scaling to `[0, 255]`; a constant input maps to all zeros.
pub fn normalize_u8(values: &[f32]) -> Vec<u8> {
    let (lo, hi) = values
        .iter()
        .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if !(range > 0.0) || !range.is_finite() {
        return vec![0; values.len()];
    }
    values
        .iter()
        .map(|&v| ((v - lo) as f64 / range as f64 * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect()
}

impl FeatureMap {
    pub fn new(source: MapSource, values: Tensor<f32>) -> Self {
        let normalized = normalize_u8(values.data());
        FeatureMap {
            source,
            values,
            normalized,
        }
    }

    pub fn frames(&self) -> usize {
        self.values.rows()
    }

    pub fn channels(&self) -> usize {
        self.values.cols()
    }

    /// The first `frames` rows, renormalized.
    pub fn truncated(&self, frames: usize) -> Result<FeatureMap> {
        if frames == 0 || frames > self.frames() {
            return Err(Error::InvalidArgument(format!(
                "cannot keep {} of {} frames",
                frames,
                self.frames()
            )));
        }
        let c = self.channels();
        let values = Tensor::from_vec(&[frames, c], self.values.data()[..frames * c].to_vec())?;
        Ok(FeatureMap::new(self.source, values))
    }

    /// Binary PGM with time on the horizontal axis and one row per channel.
    pub fn to_pgm(&self) -> Vec<u8> {
        let (t, c) = (self.frames(), self.channels());
        let mut out = format!("P5\n{} {}\n255\n", t, c).into_bytes();
        for ch in 0..c {
            out.extend((0..t).map(|f| self.normalized[f * c + ch]));
        }
        out
    }

    /// Raw values, one frame per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for t in 0..self.frames() {
            let row: Vec<String> = self.values.row(t).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_pgm()).map_err(|e| Error::io(path, e))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Input, every block output `F_i`, and the GTCM output, in that order.
pub fn export_feature_maps(checkpoint: &Checkpoint, input: &Tensor<f32>, true_len: usize) -> Result<Vec<FeatureMap>> {
    let trace = forward_trace(&checkpoint.config, &checkpoint.params, input, true_len)?;
    let mut maps = Vec::with_capacity(trace.blocks.len() + 2);
    maps.push(FeatureMap::new(MapSource::Input, trace.input));
    for (i, block) in trace.blocks.into_iter().enumerate() {
        maps.push(FeatureMap::new(MapSource::Gcb(i + 1), block.output));
    }
    maps.push(FeatureMap::new(MapSource::GtcmOutput, trace.gtcm_output));
    Ok(maps)
}
