//! Finite-difference gradient oracles at 64-bit, shared with the acceptance suite.

use gmtc_core::model::{self, ModelConfig, ParamStore};
use gmtc_core::ndcore::gradcheck::max_relative_error;
use gmtc_core::ndcore::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const OP_TOL: f64 = 1e-4;
pub const MODEL_TOL: f64 = 1e-3;

fn random(rng: &mut impl Rng, shape: &[usize]) -> Tensor<f64> {
    let n = shape.iter().product();
    Tensor::from_vec(shape, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn with_data(like: &Tensor<f64>, data: &[f64]) -> Tensor<f64> {
    Tensor::from_vec(like.shape(), data.to_vec()).unwrap()
}

fn weighted_sum(a: &Tensor<f64>, w: &Tensor<f64>) -> f64 {
    a.data().iter().zip(w.data()).map(|(x, y)| x * y).sum()
}

/// Worst relative error of conv gradients (input, kernel, bias) over random shapes.
pub fn conv_worst(seed: u64, cases: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let t = rng.gen_range(1..9);
        let (ci, co, k, d) = (rng.gen_range(1..5), rng.gen_range(1..5), rng.gen_range(1..4), rng.gen_range(1..5));
        let x = random(&mut rng, &[t, ci]);
        let p = ConvParams {
            kernel: random(&mut rng, &[co, ci, k]),
            bias: random(&mut rng, &[co]),
            dilation: d,
        };
        let w = random(&mut rng, &[t, co]);
        let g = conv1d_causal_backward(&x, &p, &w).unwrap();

        let e = max_relative_error(
            |v| weighted_sum(&conv1d_causal(&with_data(&x, v), &p).unwrap(), &w),
            x.data(),
            g.grad_x.data(),
            0..x.len(),
        );
        worst = worst.max(e);
        let e = max_relative_error(
            |v| {
                let q = ConvParams { kernel: with_data(&p.kernel, v), ..p.clone() };
                weighted_sum(&conv1d_causal(&x, &q).unwrap(), &w)
            },
            p.kernel.data(),
            g.grad_kernel.data(),
            0..p.kernel.len(),
        );
        worst = worst.max(e);
        let e = max_relative_error(
            |v| {
                let q = ConvParams { bias: with_data(&p.bias, v), ..p.clone() };
                weighted_sum(&conv1d_causal(&x, &q).unwrap(), &w)
            },
            p.bias.data(),
            g.grad_bias.data(),
            0..p.bias.len(),
        );
        worst = worst.max(e);
    }
    worst
}

/// Worst relative error of the activations, masked pooling, dense and softmax cross-entropy.
pub fn elementwise_and_head_worst(seed: u64, cases: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let (t, c, k) = (rng.gen_range(1..7), rng.gen_range(1..6), rng.gen_range(2..6));
        let x = random(&mut rng, &[t, c]);
        let w = random(&mut rng, &[t, c]);

        let ops: [(&dyn Fn(&Tensor<f64>) -> Tensor<f64>, Tensor<f64>); 3] = [
            (&|v| relu(v), relu_backward(&x, &w)),
            (&|v| sigmoid(v), sigmoid_backward(&sigmoid(&x), &w)),
            (&|v| leaky_relu(v, 0.05), leaky_relu_backward(&x, &w, 0.05)),
        ];
        for (op, analytic) in ops {
            let e = max_relative_error(|v| weighted_sum(&op(&with_data(&x, v)), &w), x.data(), analytic.data(), 0..x.len());
            worst = worst.max(e);
        }

        let wc = random(&mut rng, &[c]);
        let len = rng.gen_range(1..=t);
        let analytic = global_avg_pool_backward(&wc, t, len);
        let e = max_relative_error(
            |v| weighted_sum(&global_avg_pool_masked(&with_data(&x, v), len).unwrap(), &wc),
            x.data(),
            analytic.data(),
            0..x.len(),
        );
        worst = worst.max(e);

        let xv = random(&mut rng, &[c]);
        let wm = random(&mut rng, &[k, c]);
        let b = random(&mut rng, &[k]);
        let label = rng.gen_range(0..k);
        let loss = |xv: &Tensor<f64>, wm: &Tensor<f64>, b: &Tensor<f64>| {
            softmax_cross_entropy(&dense(xv, wm, b).unwrap(), label).unwrap().0
        };
        let (_, _, grad_logits) = softmax_cross_entropy(&dense(&xv, &wm, &b).unwrap(), label).unwrap();
        let g = dense_backward(&xv, &wm, &grad_logits).unwrap();
        worst = worst.max(max_relative_error(|v| loss(&with_data(&xv, v), &wm, &b), xv.data(), g.grad_x.data(), 0..c));
        worst = worst.max(max_relative_error(|v| loss(&xv, &with_data(&wm, v), &b), wm.data(), g.grad_weight.data(), 0..k * c));
        worst = worst.max(max_relative_error(|v| loss(&xv, &wm, &with_data(&b, v)), b.data(), g.grad_bias.data(), 0..k));
    }
    worst
}

pub fn tiny_config() -> ModelConfig {
    ModelConfig {
        n_gcb: 2,
        n_gscb: 1,
        gating_levels: 2,
        n_classes: 3,
        seq_len: 16,
        ..ModelConfig::default()
    }
}

fn randomized_params(cfg: &ModelConfig, seed: u64) -> ParamStore<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = ParamStore::<f32>::init(cfg, seed).cast::<f64>();
    for t in params.tensors_mut() {
        if t.rank() == 1 {
            for v in t.data_mut() {
                *v = rng.gen_range(-0.3..0.3);
            }
        }
    }
    params
}

pub fn full_model_worst(cfg: &ModelConfig, seed: u64, samples_per_tensor: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = randomized_params(cfg, seed);
    let input = random(&mut rng, &[cfg.seq_len, cfg.channels]);
    let true_len = cfg.seq_len - 3;
    let label = rng.gen_range(0..cfg.n_classes);

    let mut grads = params.zeros_like();
    model::accumulate_example(cfg, &params, &input, true_len, label, &mut grads).unwrap();

    let n_tensors = params.tensors().len();
    let mut worst: f64 = 0.0;
    for ti in 0..n_tensors {
        let base = params.tensors()[ti].clone();
        let analytic = grads.tensors()[ti].clone();
        let indices: Vec<usize> = if base.len() <= samples_per_tensor {
            (0..base.len()).collect()
        } else {
            (0..samples_per_tensor).map(|_| rng.gen_range(0..base.len())).collect()
        };
        let e = max_relative_error(
            |v| {
                let mut p = params.clone();
                *p.tensors_mut()[ti] = with_data(&base, v);
                let logits = model::forward(cfg, &p, &input, true_len).unwrap();
                softmax_cross_entropy(&logits, label).unwrap().0
            },
            base.data(),
            analytic.data(),
            indices,
        );
        worst = worst.max(e);
    }
    worst
}

/// The tiny configuration plus variants covering the other structural axes.
pub fn model_variants() -> Vec<ModelConfig> {
    vec![
        tiny_config(),
        ModelConfig { skip_mode: model::SkipMode::MaxScale, ..tiny_config() },
        ModelConfig { gating_levels: 3, n_gscb: 2, ..tiny_config() },
        ModelConfig { drd_scheme: model::DrdScheme::Raw, gating_levels: 1, masked_gap: true, ..tiny_config() },
    ]
}
