//! 39-D MFCC front end: Hamming-windowed frames, 2048-point power spectrum,
//! 128-band HTK mel filterbank, log, orthonormal DCT-II (13 cepstra), then
//! first and second order regression deltas.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::dsp::audio::AudioClip;
use crate::dsp::features::FeatureMatrix;
use crate::error::{Error, Result};
use crate::ndcore::Tensor;

pub const FEATURE_DIM: usize = 39;
pub const TARGET_RATE: u32 = 22050;

#[derive(Clone, Debug, PartialEq)]
pub struct MfccConfig {
    pub frame_len_s: f64,
    pub hop_s: f64,
    pub n_mels: usize,
    pub n_ceps: usize,
    pub delta_width: usize,
    pub log_floor: f64,
    /// Per-utterance zero-mean / unit-variance per column. Off by default.
    pub normalize: bool,
}

impl Default for MfccConfig {
    fn default() -> Self {
        MfccConfig {
            frame_len_s: 0.05,
            hop_s: 0.0125,
            n_mels: 128,
            n_ceps: 13,
            delta_width: 2,
            log_floor: 1e-10,
            normalize: false,
        }
    }
}

/// Seconds to whole samples, rounding down. The small bias absorbs
/// representation error in products like `0.05 * 20000`.
pub fn seconds_to_samples(seconds: f64, sample_rate: u32) -> usize {
    (seconds * sample_rate as f64 + 1e-9).floor() as usize
}

/// `1 + floor((n - frame_len) / hop)`, or `None` if the signal is shorter than one frame.
pub fn frame_count(n_samples: usize, frame_len: usize, hop: usize) -> Option<usize> {
    if n_samples < frame_len || frame_len == 0 || hop == 0 {
        None
    } else {
        Some(1 + (n_samples - frame_len) / hop)
    }
}

/// Splits a clip into overlapping frames without centering.
pub fn frame_signal(clip: &AudioClip, frame_len_s: f64, hop_s: f64) -> Result<Vec<Vec<f32>>> {
    let frame_len = seconds_to_samples(frame_len_s, clip.sample_rate);
    let hop = seconds_to_samples(hop_s, clip.sample_rate);
    let n = frame_count(clip.samples.len(), frame_len, hop).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "clip of {} samples is shorter than one {}-sample frame",
            clip.samples.len(),
            frame_len
        ))
    })?;
    Ok((0..n)
        .map(|i| clip.samples[i * hop..i * hop + frame_len].to_vec())
        .collect())
}

/// Symmetric Hamming window.
pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters (peak 1) on HTK mel spacing, `n_mels × (n_fft/2 + 1)`.
pub fn mel_filterbank(n_mels: usize, n_fft: usize, sample_rate: f64, fmin: f64, fmax: f64) -> Vec<Vec<f64>> {
    let n_bins = n_fft / 2 + 1;
    let (mel_lo, mel_hi) = (hz_to_mel(fmin), hz_to_mel(fmax));
    let edges: Vec<f64> = (0..n_mels + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n_mels + 1) as f64))
        .collect();
    (0..n_mels)
        .map(|m| {
            let (left, center, right) = (edges[m], edges[m + 1], edges[m + 2]);
            (0..n_bins)
                .map(|k| {
                    let f = k as f64 * sample_rate / n_fft as f64;
                    let rising = (f - left) / (center - left);
                    let falling = (right - f) / (right - center);
                    rising.min(falling).max(0.0)
                })
                .collect()
        })
        .collect()
}

/// Orthonormal DCT-II, keeping the first `n_out` coefficients.
pub fn dct_ii_ortho(x: &[f64], n_out: usize) -> Vec<f64> {
    let n = x.len() as f64;
    (0..n_out)
        .map(|k| {
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            scale
                * x.iter()
                    .enumerate()
                    .map(|(i, &v)| v * (PI * k as f64 * (2.0 * i as f64 + 1.0) / (2.0 * n)).cos())
                    .sum::<f64>()
        })
        .collect()
}

/// Regression deltas over time with edge replication.
pub fn deltas(seq: &[Vec<f64>], width: usize) -> Vec<Vec<f64>> {
    let t_len = seq.len();
    if t_len == 0 {
        return Vec::new();
    }
    let dim = seq[0].len();
    let denom = 2.0 * (1..=width).map(|n| (n * n) as f64).sum::<f64>();
    (0..t_len)
        .map(|t| {
            (0..dim)
                .map(|d| {
                    (1..=width)
                        .map(|n| {
                            let ahead = seq[(t + n).min(t_len - 1)][d];
                            let behind = seq[t.saturating_sub(n)][d];
                            n as f64 * (ahead - behind)
                        })
                        .sum::<f64>()
                        / denom
                })
                .collect()
        })
        .collect()
}

/// Precomputed window, filterbank, FFT plan and DCT basis for one sample rate.
pub struct MfccExtractor {
    config: MfccConfig,
    sample_rate: u32,
    frame_len: usize,
    hop: usize,
    n_fft: usize,
    window: Vec<f64>,
    filterbank: Vec<Vec<f64>>,
    fft: Arc<dyn Fft<f64>>,
}

impl MfccExtractor {
    pub fn new(config: MfccConfig, sample_rate: u32) -> Self {
        let frame_len = seconds_to_samples(config.frame_len_s, sample_rate);
        let hop = seconds_to_samples(config.hop_s, sample_rate);
        let n_fft = frame_len.max(1).next_power_of_two();
        let filterbank = mel_filterbank(config.n_mels, n_fft, sample_rate as f64, 0.0, sample_rate as f64 / 2.0);
        let fft = FftPlanner::new().plan_fft_forward(n_fft);
        MfccExtractor {
            window: hamming(frame_len),
            config,
            sample_rate,
            frame_len,
            hop,
            n_fft,
            filterbank,
            fft,
        }
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn n_fft(&self) -> usize {
        self.n_fft
    }

    /// Static cepstra (`T × n_ceps`) before deltas.
    pub fn cepstra(&self, clip: &AudioClip) -> Result<Vec<Vec<f64>>> {
        if clip.sample_rate != self.sample_rate {
            return Err(Error::InvalidArgument(format!(
                "extractor built for {} Hz, clip is {} Hz",
                self.sample_rate, clip.sample_rate
            )));
        }
        let n_frames = frame_count(clip.samples.len(), self.frame_len, self.hop).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "clip of {} samples is shorter than one {}-sample frame",
                clip.samples.len(),
                self.frame_len
            ))
        })?;
        let mut buf = vec![Complex::new(0.0, 0.0); self.n_fft];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let n_bins = self.n_fft / 2 + 1;
        let mut power = vec![0.0; n_bins];
        let mut log_mel = vec![0.0; self.config.n_mels];
        let mut out = Vec::with_capacity(n_frames);
        for f in 0..n_frames {
            let frame = &clip.samples[f * self.hop..f * self.hop + self.frame_len];
            for (i, c) in buf.iter_mut().enumerate() {
                *c = if i < self.frame_len {
                    Complex::new(frame[i] as f64 * self.window[i], 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                };
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            for (p, c) in power.iter_mut().zip(&buf) {
                *p = c.norm_sqr();
            }
            for (lm, filt) in log_mel.iter_mut().zip(&self.filterbank) {
                let e: f64 = filt.iter().zip(&power).map(|(w, p)| w * p).sum();
                *lm = e.max(self.config.log_floor).ln();
            }
            out.push(dct_ii_ortho(&log_mel, self.config.n_ceps));
        }
        Ok(out)
    }

    /// Full `T × 39` feature matrix: cepstra, Δ, ΔΔ.
    pub fn extract(&self, clip: &AudioClip, clip_id: &str) -> Result<FeatureMatrix> {
        let ceps = self.cepstra(clip)?;
        let d1 = deltas(&ceps, self.config.delta_width);
        let d2 = deltas(&d1, self.config.delta_width);
        let t_len = ceps.len();
        let dim = 3 * self.config.n_ceps;
        let mut data = Vec::with_capacity(t_len * dim);
        for t in 0..t_len {
            data.extend(ceps[t].iter().chain(&d1[t]).chain(&d2[t]).map(|&v| v as f32));
        }
        let mut frames = Tensor::from_vec(&[t_len, dim], data)?;
        if self.config.normalize {
            normalize_columns(&mut frames);
        }
        if !frames.is_finite() {
            return Err(Error::Numeric(format!("non-finite MFCC for {}", clip_id)));
        }
        FeatureMatrix::new(frames, t_len, clip_id)
    }
}

fn normalize_columns(x: &mut Tensor<f32>) {
    let (t_len, dim) = (x.rows(), x.cols());
    for c in 0..dim {
        let mean = (0..t_len).map(|t| x.get2(t, c) as f64).sum::<f64>() / t_len as f64;
        let var = (0..t_len).map(|t| (x.get2(t, c) as f64 - mean).powi(2)).sum::<f64>() / t_len as f64;
        let std = var.sqrt().max(1e-8);
        for t in 0..t_len {
            let v = &mut x.row_mut(t)[c];
            *v = ((*v as f64 - mean) / std) as f32;
        }
    }
}

/// Default 39-D MFCC of a clip already at 22050 Hz.
pub fn mfcc_39(clip: &AudioClip, clip_id: &str) -> Result<FeatureMatrix> {
    MfccExtractor::new(MfccConfig::default(), TARGET_RATE).extract(clip, clip_id)
}
