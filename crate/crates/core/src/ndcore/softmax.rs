use crate::error::{Error, Result};
use crate::ndcore::tensor::{Real, Tensor};

/// Shift-invariant softmax: the maximum is subtracted before exponentiation.
pub fn softmax<R: Real>(z: &Tensor<R>) -> Tensor<R> {
    let max = z.data().iter().copied().fold(R::neg_infinity(), R::max);
    let exps: Vec<R> = z.data().iter().map(|&v| (v - max).exp()).collect();
    let total: R = exps.iter().copied().sum();
    Tensor::from_vec(z.shape(), exps.into_iter().map(|e| e / total).collect()).unwrap()
}

/// `-ln p[label]`
pub fn cross_entropy<R: Real>(probs: &Tensor<R>, label: usize) -> Result<R> {
    if label >= probs.len() {
        return Err(Error::InvalidArgument(format!(
            "label {} out of range for {} classes",
            label,
            probs.len()
        )));
    }
    Ok(-probs.data()[label].ln())
}

/// Fused softmax + cross-entropy on logits. Returns the loss, the probabilities,
/// and the gradient w.r.t. the logits (`probs - onehot(label)`).
pub fn softmax_cross_entropy<R: Real>(logits: &Tensor<R>, label: usize) -> Result<(R, Tensor<R>, Tensor<R>)> {
    if label >= logits.len() {
        return Err(Error::InvalidArgument(format!(
            "label {} out of range for {} classes",
            label,
            logits.len()
        )));
    }
    let z = logits.data();
    let max = z.iter().copied().fold(R::neg_infinity(), R::max);
    let log_sum = z.iter().map(|&v| (v - max).exp()).sum::<R>().ln() + max;
    let loss = log_sum - z[label];
    let probs = softmax(logits);
    let mut grad = probs.clone();
    grad.data_mut()[label] -= R::one();
    Ok((loss, probs, grad))
}
