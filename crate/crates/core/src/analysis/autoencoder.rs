use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ndcore::{dense, dense_backward, xavier_uniform, AdamConfig, AdamState, DenseParams, Tensor};

/// Layer widths after the input.
const WIDTHS: [usize; 8] = [64, 16, 8, 2, 8, 16, 128, AE_INPUT];
const BOTTLENECK: usize = 3;
pub const AE_INPUT: usize = 39;
pub const AE_MIN_SAMPLES: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct AeConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
}

impl Default for AeConfig {
    fn default() -> Self {
        AeConfig {
            epochs: 200,
            batch_size: 32,
            adam: AdamConfig::default(),
        }
    }
}

/// Dense autoencoder with a two-unit linear bottleneck and linear output.
#[derive(Clone, Debug, PartialEq)]
pub struct AeModel {
    pub layers: Vec<DenseParams<f64>>,
    pub initial_mse: f64,
    pub final_mse: f64,
}

fn is_linear(layer: usize) -> bool {
    layer == BOTTLENECK || layer == WIDTHS.len() - 1
}

fn check_input(features: &[Vec<f64>]) -> Result<()> {
    if features.len() < AE_MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "autoencoder needs at least {} samples, got {}",
            AE_MIN_SAMPLES,
            features.len()
        )));
    }
    if let Some(row) = features.iter().find(|r| r.len() != AE_INPUT) {
        return Err(Error::Shape(format!(
            "autoencoder input width must be {}, got {}",
            AE_INPUT,
            row.len()
        )));
    }
    Ok(())
}

/// Activations of every layer, input first.
fn activations(layers: &[DenseParams<f64>], x: &[f64], upto: usize) -> Result<Vec<Tensor<f64>>> {
    let mut acts = vec![Tensor::from_vec(&[x.len()], x.to_vec())?];
    for (i, layer) in layers.iter().enumerate().take(upto) {
        let z = dense(acts.last().unwrap(), &layer.weight, &layer.bias)?;
        acts.push(if is_linear(i) { z } else { z.map(|v| v.max(0.0)) });
    }
    Ok(acts)
}

impl AeModel {
    fn init(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fan_in = AE_INPUT;
        let layers = WIDTHS
            .iter()
            .map(|&out| {
                let layer = DenseParams {
                    weight: xavier_uniform(&mut rng, &[out, fan_in], fan_in, out),
                    bias: Tensor::zeros(&[out]),
                };
                fan_in = out;
                layer
            })
            .collect();
        AeModel {
            layers,
            initial_mse: f64::NAN,
            final_mse: f64::NAN,
        }
    }

    /// Mean squared reconstruction error over all samples and dimensions.
    pub fn reconstruction_mse(&self, features: &[Vec<f64>]) -> Result<f64> {
        let mut total = 0.0;
        for x in features {
            let acts = activations(&self.layers, x, self.layers.len())?;
            let y = acts.last().unwrap();
            total += y.data().iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
        Ok(total / (features.len() * AE_INPUT) as f64)
    }

    /// Summed MSE and gradients over one mini-batch.
    fn batch_gradient(&self, features: &[Vec<f64>], batch: &[usize]) -> Result<Vec<DenseParams<f64>>> {
        let mut grads: Vec<DenseParams<f64>> =
            self.layers.iter().map(|l| DenseParams::zeros(l.inputs(), l.outputs())).collect();
        let scale = 2.0 / (batch.len() * AE_INPUT) as f64;
        for &i in batch {
            let x = &features[i];
            let acts = activations(&self.layers, x, self.layers.len())?;
            let y = acts.last().unwrap();
            let mut g = Tensor::from_vec(&[AE_INPUT], y.data().iter().zip(x).map(|(a, b)| scale * (a - b)).collect())?;
            for l in (0..self.layers.len()).rev() {
                if !is_linear(l) {
                    let out = &acts[l + 1];
                    g.data_mut().iter_mut().zip(out.data()).for_each(|(gv, &a)| {
                        if a <= 0.0 {
                            *gv = 0.0
                        }
                    });
                }
                let d = dense_backward(&acts[l], &self.layers[l].weight, &g)?;
                grads[l].weight.add_assign(&d.grad_weight);
                grads[l].bias.add_assign(&d.grad_bias);
                g = d.grad_x;
            }
        }
        Ok(grads)
    }
}

/// Trains the autoencoder on pooled 39-D features with mini-batch Adam.
pub fn ae_train(features: &[Vec<f64>], seed: u64, config: &AeConfig) -> Result<AeModel> {
    check_input(features)?;
    if config.batch_size == 0 {
        return Err(Error::Config("batch_size must be at least 1".into()));
    }
    let mut model = AeModel::init(seed);
    model.initial_mse = model.reconstruction_mse(features)?;
    let mut adam = AdamState::new(
        config.adam,
        model.layers.iter().flat_map(|l| [&l.weight, &l.bias]),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..features.len()).collect();
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let grads = model.batch_gradient(features, batch)?;
            let mut params: Vec<&mut Tensor<f64>> =
                model.layers.iter_mut().flat_map(|l| [&mut l.weight, &mut l.bias]).collect();
            let grad_refs: Vec<&Tensor<f64>> = grads.iter().flat_map(|l| [&l.weight, &l.bias]).collect();
            adam.step(&mut params, &grad_refs)?;
        }
    }
    model.final_mse = model.reconstruction_mse(features)?;
    if !model.final_mse.is_finite() {
        return Err(Error::Numeric("autoencoder training diverged".into()));
    }
    Ok(model)
}

/// Bottleneck coordinates, one `[x, y]` pair per sample.
pub fn ae_project(model: &AeModel, features: &[Vec<f64>]) -> Result<Vec<[f64; 2]>> {
    if let Some(row) = features.iter().find(|r| r.len() != AE_INPUT) {
        return Err(Error::Shape(format!(
            "autoencoder input width must be {}, got {}",
            AE_INPUT,
            row.len()
        )));
    }
    features
        .iter()
        .map(|x| {
            let acts = activations(&model.layers, x, BOTTLENECK + 1)?;
            let z = acts.last().unwrap().data();
            Ok([z[0], z[1]])
        })
        .collect()
}
