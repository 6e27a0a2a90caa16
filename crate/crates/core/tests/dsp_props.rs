use gmtc_core::dsp::mfcc::{dct_ii_ortho, frame_count, hamming, hz_to_mel};
use gmtc_core::dsp::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex, FftPlanner};

fn noise(seed: u64, n: usize, rate: u32) -> AudioClip {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n).map(|_| 0.1 * rng.sample::<f32, _>(StandardNormal)).collect();
    AudioClip::new(samples, rate).unwrap()
}

fn tone(freq: f64, seconds: f64, rate: u32) -> AudioClip {
    let n = (seconds * rate as f64) as usize;
    let samples = (0..n)
        .map(|i| (0.5 * (2.0 * std::f64::consts::PI * freq * i as f64 / rate as f64).sin()) as f32)
        .collect();
    AudioClip::new(samples, rate).unwrap()
}

#[test]
fn one_second_gives_77_frames() {
    let f = mfcc_39(&tone(300.0, 1.0, 22050), "t").unwrap();
    assert_eq!(f.frames.shape(), &[77, FEATURE_DIM]);
    assert_eq!(f.true_len, 77);
}

#[test]
fn spot_values() {
    assert!((hamming(1102)[0] - 0.08).abs() < 1e-12);
    assert!((hz_to_mel(700.0) - 2595.0 * 2f64.log10()).abs() < 1e-9);
    let c = dct_ii_ortho(&[3.0; 128], 13);
    assert!((c[0] - 3.0 * 128f64.sqrt()).abs() < 1e-9);
    assert!(c[1..].iter().all(|v| v.abs() < 1e-9));
}

#[test]
fn silence_is_finite() {
    let f = mfcc_39(&AudioClip::new(vec![0.0; 22050], 22050).unwrap(), "s").unwrap();
    assert!(f.frames.is_finite());
    let floor_c0 = 1e-10f64.ln() * 128f64.sqrt();
    assert!((f.frames.get2(0, 0) as f64 - floor_c0).abs() < 1e-3);
}

#[test]
fn resampled_tone_keeps_its_frequency() {
    for &(rate, freq) in &[(16000u32, 440.0), (44100, 440.0), (48000, 1000.0)] {
        let out = resample(&tone(freq, 1.0, rate), TARGET_RATE).unwrap();
        assert_eq!(out.sample_rate, TARGET_RATE);
        let n = out.samples.len();
        assert!((n as i64 - 22050).abs() <= 1);
        let mut buf: Vec<Complex<f64>> = out.samples.iter().map(|&s| Complex::new(s as f64, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let peak = (1..n / 2).max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm())).unwrap();
        let peak_hz = peak as f64 * TARGET_RATE as f64 / n as f64;
        assert!((peak_hz - freq).abs() <= 1.5, "{} Hz -> peak {}", freq, peak_hz);
    }
}

#[test]
fn wav_round_trip_through_pcm16() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.wav");
    let clip = tone(220.0, 0.2, 16000);
    write_wav_pcm16(&path, &clip).unwrap();
    let back = read_wav(&path).unwrap();
    assert_eq!(back.sample_rate, 16000);
    assert_eq!(back.samples.len(), clip.samples.len());
    assert!(back.samples.iter().zip(&clip.samples).all(|(a, b)| (a - b).abs() < 1.0 / 16000.0));
}

#[test]
fn cache_round_trip_is_bit_exact() {
    let feats: Vec<FeatureMatrix> = (0..3).map(|i| mfcc_39(&noise(i, 30000, 22050), &format!("clip{}", i)).unwrap()).collect();
    let t_max = padded_length(feats.iter().map(|f| f.true_len));
    assert_eq!(t_max % 32, 0);
    let (padded, truncated) = pad_all(&feats, t_max).unwrap();
    assert_eq!(truncated, 0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.cache");
    cache_write(&path, &padded).unwrap();
    assert_eq!(cache_read(&path).unwrap(), padded);
    let first = std::fs::read(&path).unwrap();
    cache_write(&path, &padded).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gain_moves_only_c0(seed in any::<u64>(), gain in 0.05f32..8.0) {
        let clip = noise(seed, 8000, 22050);
        let louder = AudioClip::new(clip.samples.iter().map(|s| s * gain).collect(), 22050).unwrap();
        let a = mfcc_39(&clip, "a").unwrap();
        let b = mfcc_39(&louder, "b").unwrap();
        let shift = 2.0 * (gain as f64).ln() * 128f64.sqrt();
        for t in 0..a.true_len {
            let (ra, rb) = (a.frames.row(t), b.frames.row(t));
            prop_assert!(((rb[0] - ra[0]) as f64 - shift).abs() < 2e-3 * (1.0 + shift.abs()));
            for c in 1..FEATURE_DIM {
                prop_assert!((rb[c] - ra[c]).abs() < 2e-3 * (1.0 + ra[c].abs()), "col {}", c);
            }
        }
    }

    #[test]
    fn frame_count_closed_form(n in 1102usize..200_000) {
        let clip = AudioClip::new(vec![0.01; n], 22050).unwrap();
        let f = mfcc_39(&clip, "c").unwrap();
        prop_assert_eq!(f.true_len, 1 + (n - 1102) / 275);
        prop_assert_eq!(Some(f.true_len), frame_count(n, 1102, 275));
    }

    #[test]
    fn padding_preserves_prefix(len in 1usize..80, extra in 0usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frames = gmtc_core::Tensor::from_vec(&[len, 3], (0..len * 3).map(|_| rng.gen::<f32>()).collect()).unwrap();
        let f = FeatureMatrix::new(frames, len, "x").unwrap();
        let (p, truncated) = f.pad_to(len + extra).unwrap();
        prop_assert!(!truncated);
        prop_assert_eq!(p.unpad(), f.clone());
        prop_assert!(p.frames.data()[len * 3..].iter().all(|&v| v == 0.0));
    }
}
