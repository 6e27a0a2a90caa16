use crate::error::{Error, Result};
use crate::ndcore::tensor::{Real, Tensor};

/// Mean over the time axis of a `T × C` map.
pub fn global_avg_pool<R: Real>(x: &Tensor<R>) -> Result<Tensor<R>> {
    if x.rank() != 2 {
        return Err(Error::Shape(format!("expected T x C, got {:?}", x.shape())));
    }
    global_avg_pool_masked(x, x.rows())
}

/// Mean over the first `len` frames only.
pub fn global_avg_pool_masked<R: Real>(x: &Tensor<R>, len: usize) -> Result<Tensor<R>> {
    if x.rank() != 2 {
        return Err(Error::Shape(format!("expected T x C, got {:?}", x.shape())));
    }
    if len == 0 || len > x.rows() {
        return Err(Error::InvalidArgument(format!(
            "pooling length {} outside 1..={}",
            len,
            x.rows()
        )));
    }
    let c = x.cols();
    let mut out = vec![R::zero(); c];
    for t in 0..len {
        for (o, &v) in out.iter_mut().zip(x.row(t)) {
            *o += v;
        }
    }
    let inv = R::one() / R::from_f64(len as f64);
    out.iter_mut().for_each(|v| *v *= inv);
    Tensor::from_vec(&[c], out)
}

/// Spreads a pooled gradient back over `frames` rows, of which the first `len` were averaged.
pub fn global_avg_pool_backward<R: Real>(grad: &Tensor<R>, frames: usize, len: usize) -> Tensor<R> {
    let c = grad.len();
    let mut out = Tensor::zeros(&[frames, c]);
    let inv = R::one() / R::from_f64(len as f64);
    for t in 0..len {
        for (o, &g) in out.row_mut(t).iter_mut().zip(grad.data()) {
            *o = g * inv;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pooled_means() {
        let x = Tensor::from_vec(&[2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(global_avg_pool(&x).unwrap().data(), &[2.0, 3.0]);
        let x = Tensor::from_vec(&[4, 1], vec![1.0, 2.0, 3.0, 6.0]).unwrap();
        assert_eq!(global_avg_pool(&x).unwrap().data(), &[3.0]);
        let x = Tensor::filled(&[5, 3], 0.25f64);
        assert_eq!(global_avg_pool(&x).unwrap().data(), &[0.25; 3]);
    }

    #[test]
    fn masked_pool_ignores_tail() {
        let x = Tensor::from_vec(&[3, 1], vec![1.0, 3.0, 100.0]).unwrap();
        assert_eq!(global_avg_pool_masked(&x, 2).unwrap().data(), &[2.0]);
        assert!(global_avg_pool_masked(&x, 0).is_err());
        assert!(global_avg_pool_masked(&x, 4).is_err());
    }
}
