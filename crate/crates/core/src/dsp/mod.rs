//! Audio input and the MFCC feature pipeline.

mod audio;
pub mod cache;
mod features;
pub mod mfcc;
mod resample;

use std::path::Path;

pub use audio::{read_wav, write_wav_pcm16, AudioClip};
pub use cache::{cache_read, cache_write};
pub use features::{pad_all, padded_length, FeatureMatrix};
pub use mfcc::{frame_signal, mfcc_39, MfccConfig, MfccExtractor, FEATURE_DIM, TARGET_RATE};
pub use resample::resample;

use crate::error::Result;

/// Reads a WAV file, resamples to 22050 Hz, and extracts unpadded 39-D features.
pub fn extract_file(extractor: &MfccExtractor, path: &Path, clip_id: &str) -> Result<FeatureMatrix> {
    let clip = read_wav(path)?;
    let clip = resample(&clip, TARGET_RATE)?;
    extractor.extract(&clip, clip_id)
}
