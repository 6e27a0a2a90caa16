use crate::error::{Error, Result};
use crate::ndcore::tensor::{Real, Tensor};

#[derive(Clone, Debug, PartialEq)]
pub struct DenseParams<R> {
    /// `(out, in)`
    pub weight: Tensor<R>,
    /// `(out)`
    pub bias: Tensor<R>,
}

impl<R: Real> DenseParams<R> {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        DenseParams {
            weight: Tensor::zeros(&[outputs, inputs]),
            bias: Tensor::zeros(&[outputs]),
        }
    }

    pub fn inputs(&self) -> usize {
        self.weight.shape()[1]
    }

    pub fn outputs(&self) -> usize {
        self.weight.shape()[0]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseGrads<R> {
    pub grad_x: Tensor<R>,
    pub grad_weight: Tensor<R>,
    pub grad_bias: Tensor<R>,
}

/// `W x + b`
pub fn dense<R: Real>(x: &Tensor<R>, w: &Tensor<R>, b: &Tensor<R>) -> Result<Tensor<R>> {
    check(x, w, b)?;
    let (k, c) = (w.shape()[0], w.shape()[1]);
    let out = (0..k)
        .map(|o| {
            let row = &w.data()[o * c..(o + 1) * c];
            row.iter().zip(x.data()).map(|(&a, &v)| a * v).sum::<R>() + b.data()[o]
        })
        .collect();
    Tensor::from_vec(&[k], out)
}

pub fn dense_backward<R: Real>(
    x: &Tensor<R>,
    w: &Tensor<R>,
    grad_out: &Tensor<R>,
) -> Result<DenseGrads<R>> {
    let (k, c) = (w.shape()[0], w.shape()[1]);
    if x.shape() != [c] || grad_out.shape() != [k] {
        return Err(Error::Shape(format!(
            "dense backward: x {:?}, W {:?}, grad {:?}",
            x.shape(),
            w.shape(),
            grad_out.shape()
        )));
    }
    let mut grad_x = vec![R::zero(); c];
    let mut grad_w = vec![R::zero(); k * c];
    for o in 0..k {
        let g = grad_out.data()[o];
        let row = &w.data()[o * c..(o + 1) * c];
        for i in 0..c {
            grad_x[i] += row[i] * g;
            grad_w[o * c + i] = g * x.data()[i];
        }
    }
    Ok(DenseGrads {
        grad_x: Tensor::from_vec(&[c], grad_x)?,
        grad_weight: Tensor::from_vec(&[k, c], grad_w)?,
        grad_bias: grad_out.clone(),
    })
}

fn check<R: Real>(x: &Tensor<R>, w: &Tensor<R>, b: &Tensor<R>) -> Result<()> {
    if w.rank() != 2 || x.shape() != [w.shape()[1]] || b.shape() != [w.shape()[0]] {
        return Err(Error::Shape(format!(
            "dense: x {:?}, W {:?}, b {:?}",
            x.shape(),
            w.shape(),
            b.shape()
        )));
    }
    Ok(())
}
