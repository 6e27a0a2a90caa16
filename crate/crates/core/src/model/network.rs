//! Forward and reverse passes of the gated temporal convolutional network.
//!
//! Per sub-block: `out = ReLU(conv_v(u)) ⊙ σ(ReLU(conv_g(u)))`. A gating level
//! averages its sub-blocks, levels chain inside a block, and a block adds its
//! input back (`H = F + G`). The classifier sees `LeakyReLU(Σ F_i)` (or just
//! the last `F`) pooled over time.

use crate::error::{Error, Result};
use crate::model::config::{ModelConfig, SkipMode};
use crate::model::params::{GcbParams, GscbParams, ParamStore};
use crate::ndcore::{
    conv1d_causal_backward_acc, conv1d_causal_into, dense, dense_backward, global_avg_pool_backward,
    global_avg_pool_masked, leaky_relu, leaky_relu_backward, sigmoid_scalar, softmax_cross_entropy, ConvParams,
    Real, Tensor,
};

/// Activations kept from one sub-block for the reverse pass.
#[derive(Clone, Debug)]
pub struct GscbCache<R> {
    value_pre: Tensor<R>,
    gate_pre: Tensor<R>,
    gate: Tensor<R>,
}

#[derive(Clone, Debug)]
pub struct GcbTrace<R> {
    /// Input of each gating level; `level_inputs[0]` is the block input `G_i`.
    pub level_inputs: Vec<Tensor<R>>,
    caches: Vec<Vec<GscbCache<R>>>,
    /// `F_i`, the averaged output of the last gating level.
    pub output: Tensor<R>,
    /// `H_i = F_i + G_i`.
    pub residual: Tensor<R>,
}

#[derive(Clone, Debug)]
pub struct ForwardTrace<R> {
    pub input: Tensor<R>,
    pub pool_len: usize,
    pub blocks: Vec<GcbTrace<R>>,
    /// Pre-activation classifier input `S`.
    pub skip_sum: Tensor<R>,
    /// `LeakyReLU(S)`, the high-level feature map.
    pub gtcm_output: Tensor<R>,
    pub pooled: Tensor<R>,
    pub logits: Tensor<R>,
}

fn conv<R: Real>(x: &Tensor<R>, p: &ConvParams<R>) -> Tensor<R> {
    let mut out = Tensor::zeros(&[x.rows(), p.out_channels()]);
    conv1d_causal_into(x, p, &mut out);
    out
}

fn check_gscb<R: Real>(u: &Tensor<R>, p: &GscbParams<R>) -> Result<()> {
    if p.value.dilation != p.gate.dilation {
        return Err(Error::InvalidArgument(format!(
            "value branch dilation {} differs from gate branch dilation {}",
            p.value.dilation, p.gate.dilation
        )));
    }
    for branch in [&p.value, &p.gate] {
        if u.rank() != 2 || branch.in_channels() != u.cols() || branch.kernel.rank() != 3 {
            return Err(Error::Shape(format!(
                "sub-block expects T x {} input, got {:?}",
                branch.in_channels(),
                u.shape()
            )));
        }
        if branch.dilation == 0 {
            return Err(Error::InvalidArgument("dilation must be positive".into()));
        }
    }
    Ok(())
}

fn gscb_forward_cached<R: Real>(u: &Tensor<R>, p: &GscbParams<R>) -> (Tensor<R>, GscbCache<R>) {
    let value_pre = conv(u, &p.value);
    let gate_pre = conv(u, &p.gate);
    let gate = gate_pre.map(|v| sigmoid_scalar(v.max(R::zero())));
    let mut out = value_pre.clone();
    for (o, &s) in out.data_mut().iter_mut().zip(gate.data()) {
        *o = o.max(R::zero()) * s;
    }
    (
        out,
        GscbCache {
            value_pre,
            gate_pre,
            gate,
        },
    )
}

/// One gated sub-block.
pub fn gscb_forward<R: Real>(u: &Tensor<R>, p: &GscbParams<R>) -> Result<Tensor<R>> {
    check_gscb(u, p)?;
    Ok(gscb_forward_cached(u, p).0)
}

fn gcb_forward_cached<R: Real>(g: &Tensor<R>, block: &GcbParams<R>) -> GcbTrace<R> {
    let mut level_inputs = Vec::with_capacity(block.levels.len());
    let mut caches = Vec::with_capacity(block.levels.len());
    let mut x = g.clone();
    for level in &block.levels {
        let inv = R::one() / R::from_f64(level.len() as f64);
        let mut mean = Tensor::zeros(x.shape());
        let mut level_caches = Vec::with_capacity(level.len());
        for p in level {
            let (out, cache) = gscb_forward_cached(&x, p);
            mean.add_assign(&out);
            level_caches.push(cache);
        }
        mean.scale(inv);
        level_inputs.push(std::mem::replace(&mut x, mean));
        caches.push(level_caches);
    }
    let mut residual = x.clone();
    residual.add_assign(g);
    GcbTrace {
        level_inputs,
        caches,
        output: x,
        residual,
    }
}

/// One gated convolution block. Returns `(F_i, H_i)`.
pub fn gcb_forward<R: Real>(g: &Tensor<R>, block: &GcbParams<R>) -> Result<(Tensor<R>, Tensor<R>)> {
    if block.levels.is_empty() || block.levels.iter().any(|l| l.is_empty()) {
        return Err(Error::Shape("block needs at least one level and one sub-block per level".into()));
    }
    for level in &block.levels {
        for p in level {
            check_gscb(g, p)?;
            if p.value.out_channels() != g.cols() {
                return Err(Error::Shape("sub-block must preserve the channel count".into()));
            }
        }
    }
    let trace = gcb_forward_cached(g, block);
    Ok((trace.output, trace.residual))
}

fn check_model<R: Real>(cfg: &ModelConfig, params: &ParamStore<R>, input: &Tensor<R>, pool_len: usize) -> Result<()> {
    cfg.validate()?;
    if input.rank() != 2 || input.cols() != cfg.channels {
        return Err(Error::Shape(format!(
            "model expects T x {} features, got {:?}",
            cfg.channels,
            input.shape()
        )));
    }
    if input.rows() != cfg.seq_len {
        return Err(Error::Shape(format!(
            "model expects {} frames, got {}",
            cfg.seq_len,
            input.rows()
        )));
    }
    if pool_len == 0 || pool_len > input.rows() {
        return Err(Error::InvalidArgument(format!("true length {} outside 1..={}", pool_len, input.rows())));
    }
    if params.blocks.len() != cfg.n_gcb
        || params.head.outputs() != cfg.n_classes
        || params.blocks.iter().any(|b| {
            b.levels.len() != cfg.gating_levels || b.levels.iter().any(|l| l.len() != cfg.n_gscb)
        })
    {
        return Err(Error::Shape("parameters do not match the model configuration".into()));
    }
    Ok(())
}

/// Forward pass keeping every intermediate needed by [`backward`].
///
/// `true_len` only matters when the configuration pools over unpadded frames.
pub fn forward_trace<R: Real>(
    cfg: &ModelConfig,
    params: &ParamStore<R>,
    input: &Tensor<R>,
    true_len: usize,
) -> Result<ForwardTrace<R>> {
    let pool_len = if cfg.masked_gap { true_len } else { input.rows() };
    check_model(cfg, params, input, pool_len)?;

    let mut g = conv(input, &params.entry);
    let mut blocks = Vec::with_capacity(cfg.n_gcb);
    let mut skip_sum = Tensor::zeros(g.shape());
    for (i, block) in params.blocks.iter().enumerate() {
        let trace = gcb_forward_cached(&g, block);
        if cfg.skip_mode == SkipMode::MultiScale || i + 1 == cfg.n_gcb {
            skip_sum.add_assign(&trace.output);
        }
        g = trace.residual.clone();
        blocks.push(trace);
    }
    let alpha = R::from_f64(cfg.leaky_alpha);
    let gtcm_output = leaky_relu(&skip_sum, alpha);
    let pooled = global_avg_pool_masked(&gtcm_output, pool_len)?;
    let logits = dense(&pooled, &params.head.weight, &params.head.bias)?;
    Ok(ForwardTrace {
        input: input.clone(),
        pool_len,
        blocks,
        skip_sum,
        gtcm_output,
        pooled,
        logits,
    })
}

/// Class logits for one padded feature map.
pub fn forward<R: Real>(cfg: &ModelConfig, params: &ParamStore<R>, input: &Tensor<R>, true_len: usize) -> Result<Tensor<R>> {
    Ok(forward_trace(cfg, params, input, true_len)?.logits)
}

fn gscb_backward<R: Real>(
    u: &Tensor<R>,
    p: &GscbParams<R>,
    cache: &GscbCache<R>,
    grad_out: &[R],
    scale: R,
    grad_u: &mut Tensor<R>,
    grads: &mut GscbParams<R>,
) {
    let n = grad_out.len();
    let mut g_value = Tensor::zeros(u.shape());
    let mut g_gate = Tensor::zeros(u.shape());
    {
        let (gv, gg) = (g_value.data_mut(), g_gate.data_mut());
        let (a, b, s) = (cache.value_pre.data(), cache.gate_pre.data(), cache.gate.data());
        for i in 0..n {
            let g = grad_out[i] * scale;
            if a[i] > R::zero() {
                gv[i] = g * s[i];
                if b[i] > R::zero() {
                    gg[i] = g * a[i] * s[i] * (R::one() - s[i]);
                }
            }
        }
    }
    conv1d_causal_backward_acc(u, &p.value, &g_value, Some(grad_u), &mut grads.value.kernel, &mut grads.value.bias);
    conv1d_causal_backward_acc(u, &p.gate, &g_gate, Some(grad_u), &mut grads.gate.kernel, &mut grads.gate.bias);
}

/// Reverse pass from a logit gradient, accumulating (`+=`) into `grads`.
pub fn backward<R: Real>(
    cfg: &ModelConfig,
    params: &ParamStore<R>,
    trace: &ForwardTrace<R>,
    grad_logits: &Tensor<R>,
    grads: &mut ParamStore<R>,
) -> Result<()> {
    let head = dense_backward(&trace.pooled, &params.head.weight, grad_logits)?;
    grads.head.weight.add_assign(&head.grad_weight);
    grads.head.bias.add_assign(&head.grad_bias);

    let frames = trace.input.rows();
    let grad_z = global_avg_pool_backward(&head.grad_x, frames, trace.pool_len);
    let grad_s = leaky_relu_backward(&trace.skip_sum, &grad_z, R::from_f64(cfg.leaky_alpha));

    // gradient arriving at H_i from the next block's input
    let mut grad_h: Option<Tensor<R>> = None;
    for i in (0..cfg.n_gcb).rev() {
        let bt = &trace.blocks[i];
        let bp = &params.blocks[i];
        let bg = &mut grads.blocks[i];

        let mut grad_f = match &grad_h {
            Some(h) => h.clone(),
            None => Tensor::zeros(grad_s.shape()),
        };
        if cfg.skip_mode == SkipMode::MultiScale || i + 1 == cfg.n_gcb {
            grad_f.add_assign(&grad_s);
        }

        let mut grad_y = grad_f;
        for l in (0..bp.levels.len()).rev() {
            let u = &bt.level_inputs[l];
            let scale = R::one() / R::from_f64(bp.levels[l].len() as f64);
            let mut grad_u = Tensor::zeros(u.shape());
            for ((p, cache), g) in bp.levels[l].iter().zip(&bt.caches[l]).zip(bg.levels[l].iter_mut()) {
                gscb_backward(u, p, cache, grad_y.data(), scale, &mut grad_u, g);
            }
            grad_y = grad_u;
        }
        // H_i = F_i + G_i
        if let Some(h) = &grad_h {
            grad_y.add_assign(h);
        }
        grad_h = Some(grad_y);
    }

    let grad_g1 = grad_h.expect("at least one block");
    conv1d_causal_backward_acc(
        &trace.input,
        &params.entry,
        &grad_g1,
        None,
        &mut grads.entry.kernel,
        &mut grads.entry.bias,
    );
    Ok(())
}

/// Cross-entropy loss and parameter gradients for one labelled example.
pub struct ExampleGrad<R> {
    pub loss: R,
    pub probs: Tensor<R>,
}

/// Forward, loss and reverse pass for one example, accumulating into `grads`.
pub fn accumulate_example<R: Real>(
    cfg: &ModelConfig,
    params: &ParamStore<R>,
    input: &Tensor<R>,
    true_len: usize,
    label: usize,
    grads: &mut ParamStore<R>,
) -> Result<ExampleGrad<R>> {
    let trace = forward_trace(cfg, params, input, true_len)?;
    let (loss, probs, grad_logits) = softmax_cross_entropy(&trace.logits, label)?;
    backward(cfg, params, &trace, &grad_logits, grads)?;
    Ok(ExampleGrad { loss, probs })
}
