use crate::ndcore::tensor::{Real, Tensor};

pub fn relu<R: Real>(x: &Tensor<R>) -> Tensor<R> {
    x.map(|v| if v > R::zero() { v } else { R::zero() })
}

pub fn sigmoid<R: Real>(x: &Tensor<R>) -> Tensor<R> {
    x.map(sigmoid_scalar)
}

pub fn leaky_relu<R: Real>(x: &Tensor<R>, alpha: R) -> Tensor<R> {
    x.map(|v| if v >= R::zero() { v } else { alpha * v })
}

#[inline]
pub(crate) fn sigmoid_scalar<R: Real>(v: R) -> R {
    // split on sign so exp never overflows
    if v >= R::zero() {
        R::one() / (R::one() + (-v).exp())
    } else {
        let e = v.exp();
        e / (R::one() + e)
    }
}

/// Gradient of `relu` at input `x`.
pub fn relu_backward<R: Real>(x: &Tensor<R>, grad_out: &Tensor<R>) -> Tensor<R> {
    zip_map(x, grad_out, |v, g| if v > R::zero() { g } else { R::zero() })
}

/// Gradient of `sigmoid` given its output `y`.
pub fn sigmoid_backward<R: Real>(y: &Tensor<R>, grad_out: &Tensor<R>) -> Tensor<R> {
    zip_map(y, grad_out, |s, g| g * s * (R::one() - s))
}

pub fn leaky_relu_backward<R: Real>(x: &Tensor<R>, grad_out: &Tensor<R>, alpha: R) -> Tensor<R> {
    zip_map(x, grad_out, |v, g| if v >= R::zero() { g } else { alpha * g })
}

fn zip_map<R: Real>(a: &Tensor<R>, b: &Tensor<R>, f: impl Fn(R, R) -> R) -> Tensor<R> {
    assert_eq!(a.shape(), b.shape());
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| f(x, y)).collect();
    Tensor::from_vec(a.shape(), data).unwrap()
}
