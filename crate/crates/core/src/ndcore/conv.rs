//! Dilated causal 1-D convolution over `T × C` sequences.
//!
//! Tap `i` of the kernel reads frame `s - d·i`; frames before the start of the
//! sequence read as zero, so the output keeps the input length.

use crate::error::{Error, Result};
use crate::ndcore::tensor::{gemm, MatView, MatViewMut, Real, Tensor};

#[derive(Clone, Debug, PartialEq)]
pub struct ConvParams<R> {
    /// `(out_channels, in_channels, kernel_size)`
    pub kernel: Tensor<R>,
    /// `(out_channels)`
    pub bias: Tensor<R>,
    pub dilation: usize,
}

impl<R: Real> ConvParams<R> {
    pub fn zeros(in_channels: usize, out_channels: usize, kernel_size: usize, dilation: usize) -> Self {
        ConvParams {
            kernel: Tensor::zeros(&[out_channels, in_channels, kernel_size]),
            bias: Tensor::zeros(&[out_channels]),
            dilation,
        }
    }

    pub fn out_channels(&self) -> usize {
        self.kernel.shape()[0]
    }

    pub fn in_channels(&self) -> usize {
        self.kernel.shape()[1]
    }

    pub fn kernel_size(&self) -> usize {
        self.kernel.shape()[2]
    }

    fn validate(&self) -> Result<()> {
        if self.kernel.rank() != 3 {
            return Err(Error::Shape(format!(
                "conv kernel must be rank 3, got {:?}",
                self.kernel.shape()
            )));
        }
        if self.bias.shape() != [self.out_channels()] {
            return Err(Error::Shape(format!(
                "conv bias {:?} does not match {} output channels",
                self.bias.shape(),
                self.out_channels()
            )));
        }
        if self.dilation == 0 {
            return Err(Error::InvalidArgument("dilation must be positive".into()));
        }
        Ok(())
    }

    fn check_input(&self, x: &Tensor<R>) -> Result<()> {
        self.validate()?;
        if x.rank() != 2 || x.cols() != self.in_channels() {
            return Err(Error::Shape(format!(
                "conv expects T x {} input, got {:?}",
                self.in_channels(),
                x.shape()
            )));
        }
        Ok(())
    }
}

/// Gradients of one causal convolution.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvGrads<R> {
    pub grad_x: Tensor<R>,
    pub grad_kernel: Tensor<R>,
    pub grad_bias: Tensor<R>,
}

pub fn conv1d_causal<R: Real>(x: &Tensor<R>, p: &ConvParams<R>) -> Result<Tensor<R>> {
    p.check_input(x)?;
    let mut out = Tensor::zeros(&[x.rows(), p.out_channels()]);
    conv1d_causal_into(x, p, &mut out);
    Ok(out)
}

/// Forward pass writing into a preallocated `T × C_out` buffer. Shapes must already be valid.
pub(crate) fn conv1d_causal_into<R: Real>(x: &Tensor<R>, p: &ConvParams<R>, out: &mut Tensor<R>) {
    let t_len = x.rows();
    let c_in = p.in_channels();
    let c_out = p.out_channels();
    let k_size = p.kernel_size();
    debug_assert_eq!(out.shape(), [t_len, c_out]);

    let bias = p.bias.data();
    for row in out.data_mut().chunks_exact_mut(c_out) {
        row.copy_from_slice(bias);
    }
    let kernel = p.kernel.data();
    let xd = x.data();
    for tap in 0..k_size {
        let shift = p.dilation * tap;
        if shift >= t_len {
            break;
        }
        let rows = t_len - shift;
        // out[shift..] += x[..T-shift] · W_tapᵀ
        gemm(
            R::one(),
            MatView { data: &xd[..rows * c_in], rows, cols: c_in, rs: c_in, cs: 1 },
            MatView { data: &kernel[tap..], rows: c_in, cols: c_out, rs: k_size, cs: c_in * k_size },
            R::one(),
            MatViewMut {
                data: &mut out.data_mut()[shift * c_out..],
                rows,
                cols: c_out,
                rs: c_out,
                cs: 1,
            },
        );
    }
}

pub fn conv1d_causal_backward<R: Real>(
    x: &Tensor<R>,
    p: &ConvParams<R>,
    grad_out: &Tensor<R>,
) -> Result<ConvGrads<R>> {
    p.check_input(x)?;
    if grad_out.shape() != [x.rows(), p.out_channels()] {
        return Err(Error::Shape(format!(
            "grad_out {:?} does not match forward output [{}, {}]",
            grad_out.shape(),
            x.rows(),
            p.out_channels()
        )));
    }
    let mut grads = ConvGrads {
        grad_x: Tensor::zeros(x.shape()),
        grad_kernel: Tensor::zeros(p.kernel.shape()),
        grad_bias: Tensor::zeros(p.bias.shape()),
    };
    conv1d_causal_backward_acc(
        x,
        p,
        grad_out,
        Some(&mut grads.grad_x),
        &mut grads.grad_kernel,
        &mut grads.grad_bias,
    );
    Ok(grads)
}

/// Backward pass accumulating (`+=`) into the provided gradient buffers.
pub(crate) fn conv1d_causal_backward_acc<R: Real>(
    x: &Tensor<R>,
    p: &ConvParams<R>,
    grad_out: &Tensor<R>,
    grad_x: Option<&mut Tensor<R>>,
    grad_kernel: &mut Tensor<R>,
    grad_bias: &mut Tensor<R>,
) {
    let t_len = x.rows();
    let c_in = p.in_channels();
    let c_out = p.out_channels();
    let k_size = p.kernel_size();
    let gd = grad_out.data();
    let xd = x.data();

    let gb = grad_bias.data_mut();
    for row in gd.chunks_exact(c_out) {
        for (b, &g) in gb.iter_mut().zip(row) {
            *b += g;
        }
    }

    for tap in 0..k_size {
        let shift = p.dilation * tap;
        if shift >= t_len {
            break;
        }
        let rows = t_len - shift;
        // dW_tap[o, i] += Σ_t g[t, o] · x[t - shift, i]
        gemm(
            R::one(),
            MatView { data: &gd[shift * c_out..], rows: c_out, cols: rows, rs: 1, cs: c_out },
            MatView { data: &xd[..rows * c_in], rows, cols: c_in, rs: c_in, cs: 1 },
            R::one(),
            MatViewMut {
                data: &mut grad_kernel.data_mut()[tap..],
                rows: c_out,
                cols: c_in,
                rs: c_in * k_size,
                cs: k_size,
            },
        );
    }

    if let Some(grad_x) = grad_x {
        let kernel = p.kernel.data();
        for tap in 0..k_size {
            let shift = p.dilation * tap;
            if shift >= t_len {
                break;
            }
            let rows = t_len - shift;
            // dx[..T-shift] += g[shift..] · W_tap
            gemm(
                R::one(),
                MatView { data: &gd[shift * c_out..], rows, cols: c_out, rs: c_out, cs: 1 },
                MatView { data: &kernel[tap..], rows: c_out, cols: c_in, rs: c_in * k_size, cs: k_size },
                R::one(),
                MatViewMut { data: grad_x.data_mut(), rows, cols: c_in, rs: c_in, cs: 1 },
            );
        }
    }
}
