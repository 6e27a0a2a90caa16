//! Band-limited resampling by direct windowed-sinc interpolation.

use std::f64::consts::PI;

use crate::dsp::audio::AudioClip;
use crate::error::Result;

const ZERO_CROSSINGS: f64 = 24.0;

fn blackman(u: f64) -> f64 {
    // u in [-1, 1]
    0.42 + 0.5 * (PI * u).cos() + 0.08 * (2.0 * PI * u).cos()
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

pub fn resample(clip: &AudioClip, target_rate: u32) -> Result<AudioClip> {
    AudioClip::new(clip.samples.clone(), target_rate)?;
    if clip.sample_rate == target_rate {
        return Ok(clip.clone());
    }
    let ratio = target_rate as f64 / clip.sample_rate as f64;
    // anti-aliasing cutoff, relative to the input Nyquist
    let cutoff = ratio.min(1.0) * 0.97;
    let half_width = ZERO_CROSSINGS / cutoff;
    let n_in = clip.samples.len();
    let n_out = ((n_in as f64 * ratio).round() as usize).max(1);
    let input = &clip.samples;

    let out = (0..n_out)
        .map(|n| {
            let pos = n as f64 / ratio;
            let lo = ((pos - half_width).ceil().max(0.0)) as usize;
            let hi = ((pos + half_width).floor() as usize).min(n_in - 1);
            let mut acc = 0.0;
            let mut norm = 0.0;
            for (j, &x) in input.iter().enumerate().take(hi + 1).skip(lo) {
                let u = pos - j as f64;
                let w = cutoff * sinc(cutoff * u) * blackman(u / half_width);
                acc += w * x as f64;
                norm += w;
            }
            // DC gain is normalized per output sample, which also handles the edges
            if norm.abs() > 1e-12 {
                (acc / norm) as f32
            } else {
                0.0
            }
        })
        .collect();
    AudioClip::new(out, target_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_rate_is_identity() {
        let clip = AudioClip::new(vec![0.1, -0.3, 0.7], 22050).unwrap();
        assert_eq!(resample(&clip, 22050).unwrap(), clip);
    }

    #[test]
    fn constant_stays_constant() {
        for (from, to) in [(48000, 22050), (16000, 22050), (44100, 22050)] {
            let clip = AudioClip::new(vec![0.25; 4000], from).unwrap();
            let out = resample(&clip, to).unwrap();
            assert!(out.samples.iter().all(|&v| (v - 0.25).abs() < 1e-5));
        }
    }

    #[test]
    fn duration_preserved_within_one_sample() {
        for (from, n) in [(48000u32, 48000usize), (16000, 12345), (44100, 777)] {
            let clip = AudioClip::new(vec![0.0; n], from).unwrap();
            let out = resample(&clip, 22050).unwrap();
            let expected = n as f64 * 22050.0 / from as f64;
            assert!((out.samples.len() as f64 - expected).abs() <= 1.0);
        }
    }

    #[test]
    fn rejects_zero_target() {
        let clip = AudioClip::new(vec![0.0; 10], 8000).unwrap();
        assert!(resample(&clip, 0).is_err());
    }
}
