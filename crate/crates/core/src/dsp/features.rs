use crate::error::{Error, Result};
use crate::ndcore::Tensor;

/// Per-utterance feature map, `T × 39`, possibly zero-padded past `true_len`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub frames: Tensor<f32>,
    pub true_len: usize,
    pub clip_id: String,
}

impl FeatureMatrix {
    pub fn new(frames: Tensor<f32>, true_len: usize, clip_id: impl Into<String>) -> Result<Self> {
        if frames.rank() != 2 {
            return Err(Error::Shape(format!("feature matrix must be T x C, got {:?}", frames.shape())));
        }
        if true_len == 0 || true_len > frames.rows() {
            return Err(Error::Shape(format!(
                "true length {} outside 1..={}",
                true_len,
                frames.rows()
            )));
        }
        Ok(FeatureMatrix {
            frames,
            true_len,
            clip_id: clip_id.into(),
        })
    }

    pub fn padded_len(&self) -> usize {
        self.frames.rows()
    }

    /// Zero rows appended up to `t_max`. Clips longer than `t_max` lose their
    /// trailing frames; the returned flag reports that truncation.
    pub fn pad_to(&self, t_max: usize) -> Result<(FeatureMatrix, bool)> {
        if t_max == 0 {
            return Err(Error::InvalidArgument("pad length must be positive".into()));
        }
        let cols = self.frames.cols();
        let keep = self.true_len.min(t_max);
        let mut data = vec![0.0f32; t_max * cols];
        data[..keep * cols].copy_from_slice(&self.frames.data()[..keep * cols]);
        let fm = FeatureMatrix::new(Tensor::from_vec(&[t_max, cols], data)?, keep, self.clip_id.clone())?;
        Ok((fm, self.true_len > t_max))
    }

    /// The first `true_len` rows.
    pub fn unpad(&self) -> FeatureMatrix {
        let cols = self.frames.cols();
        let data = self.frames.data()[..self.true_len * cols].to_vec();
        FeatureMatrix {
            frames: Tensor::from_vec(&[self.true_len, cols], data).unwrap(),
            true_len: self.true_len,
            clip_id: self.clip_id.clone(),
        }
    }
}

/// Padding length for a set of utterances: the longest true length rounded up to a multiple of 32.
pub fn padded_length(lengths: impl IntoIterator<Item = usize>) -> usize {
    let max = lengths.into_iter().max().unwrap_or(1).max(1);
    max.div_ceil(32) * 32
}

/// Pads every matrix to `t_max`, returning the number that had to be truncated.
pub fn pad_all(features: &[FeatureMatrix], t_max: usize) -> Result<(Vec<FeatureMatrix>, usize)> {
    let mut truncated = 0;
    let mut out = Vec::with_capacity(features.len());
    for fm in features {
        let (p, cut) = fm.pad_to(t_max)?;
        if cut {
            log::warn!("{}: truncated from {} to {} frames", fm.clip_id, fm.true_len, t_max);
            truncated += 1;
        }
        out.push(p);
    }
    Ok((out, truncated))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(rows: usize) -> FeatureMatrix {
        let data = (0..rows * 39).map(|v| v as f32 + 1.0).collect();
        FeatureMatrix::new(Tensor::from_vec(&[rows, 39], data).unwrap(), rows, "c").unwrap()
    }

    #[test]
    fn pad_appends_zero_rows() {
        let (p, cut) = fm(3).pad_to(5).unwrap();
        assert!(!cut);
        assert_eq!(p.true_len, 3);
        assert_eq!(p.padded_len(), 5);
        assert!(p.frames.row(3).iter().chain(p.frames.row(4)).all(|&v| v == 0.0));
        assert_eq!(p.unpad(), fm(3));
    }

    #[test]
    fn pad_to_same_length_is_unchanged() {
        let x = fm(4);
        assert_eq!(x.pad_to(4).unwrap(), (x.clone(), false));
    }

    #[test]
    fn overlong_input_is_truncated_and_counted() {
        let (p, cut) = fm(6).pad_to(4).unwrap();
        assert!(cut);
        assert_eq!(p.true_len, 4);
        assert_eq!(p.frames.row(3), fm(6).frames.row(3));
        let (_, n) = pad_all(&[fm(6), fm(2), fm(9)], 4).unwrap();
        assert_eq!(n, 2);
    }

    #[test]
    fn padded_length_rounds_to_32() {
        assert_eq!(padded_length([77, 150, 12]), 160);
        assert_eq!(padded_length([128]), 128);
        assert_eq!(padded_length([1]), 32);
    }
}
