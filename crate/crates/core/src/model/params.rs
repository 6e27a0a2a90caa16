use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::config::ModelConfig;
use crate::ndcore::{xavier_uniform, ConvParams, DenseParams, Real, Tensor};

/// Value and gate branch of one gated sub-block. The branches do not share weights.
#[derive(Clone, Debug, PartialEq)]
pub struct GscbParams<R> {
    pub value: ConvParams<R>,
    pub gate: ConvParams<R>,
}

/// One gated convolution block: `levels[l][j]` is sub-block `j` of gating level `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct GcbParams<R> {
    pub levels: Vec<Vec<GscbParams<R>>>,
}

/// Every trainable tensor of the network, in a fixed canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamStore<R> {
    pub entry: ConvParams<R>,
    pub blocks: Vec<GcbParams<R>>,
    pub head: DenseParams<R>,
}

impl<R: Real> ParamStore<R> {
    pub fn zeros(cfg: &ModelConfig) -> Self {
        let c = cfg.channels;
        let blocks = (1..=cfg.n_gcb)
            .map(|i| GcbParams {
                levels: (1..=cfg.gating_levels)
                    .map(|l| {
                        let d = cfg.dilation(i, l);
                        (0..cfg.n_gscb)
                            .map(|_| GscbParams {
                                value: ConvParams::zeros(c, c, cfg.kernel_size, d),
                                gate: ConvParams::zeros(c, c, cfg.kernel_size, d),
                            })
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        ParamStore {
            entry: ConvParams::zeros(c, c, 1, 1),
            blocks,
            head: DenseParams::zeros(c, cfg.n_classes),
        }
    }

    /// Seeded Xavier-uniform weights, zero biases.
    pub fn init(cfg: &ModelConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut store = Self::zeros(cfg);
        let c = cfg.channels;
        store.entry.kernel = xavier_uniform(&mut rng, &[c, c, 1], c, c);
        for block in &mut store.blocks {
            for level in &mut block.levels {
                for gscb in level.iter_mut() {
                    let k = cfg.kernel_size;
                    gscb.value.kernel = xavier_uniform(&mut rng, &[c, c, k], c * k, c * k);
                    gscb.gate.kernel = xavier_uniform(&mut rng, &[c, c, k], c * k, c * k);
                }
            }
        }
        store.head.weight = xavier_uniform(&mut rng, &[cfg.n_classes, c], c, cfg.n_classes);
        store
    }

    /// Same structure, all zeros.
    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.tensors_mut().into_iter().for_each(|t| t.fill(R::zero()));
        z
    }

    pub fn named(&self) -> Vec<(String, &Tensor<R>)> {
        let mut out = vec![
            ("entry.kernel".to_string(), &self.entry.kernel),
            ("entry.bias".to_string(), &self.entry.bias),
        ];
        for (i, block) in self.blocks.iter().enumerate() {
            for (l, level) in block.levels.iter().enumerate() {
                for (j, g) in level.iter().enumerate() {
                    let p = format!("gcb{}.level{}.gscb{}", i + 1, l + 1, j + 1);
                    out.push((format!("{p}.value.kernel"), &g.value.kernel));
                    out.push((format!("{p}.value.bias"), &g.value.bias));
                    out.push((format!("{p}.gate.kernel"), &g.gate.kernel));
                    out.push((format!("{p}.gate.bias"), &g.gate.bias));
                }
            }
        }
        out.push(("head.weight".to_string(), &self.head.weight));
        out.push(("head.bias".to_string(), &self.head.bias));
        out
    }

    pub fn tensors(&self) -> Vec<&Tensor<R>> {
        self.named().into_iter().map(|(_, t)| t).collect()
    }

    /// Mutable tensors in the same order as [`ParamStore::named`].
    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor<R>> {
        let mut out = vec![&mut self.entry.kernel, &mut self.entry.bias];
        for block in &mut self.blocks {
            for level in &mut block.levels {
                for g in level.iter_mut() {
                    out.push(&mut g.value.kernel);
                    out.push(&mut g.value.bias);
                    out.push(&mut g.gate.kernel);
                    out.push(&mut g.gate.bias);
                }
            }
        }
        out.push(&mut self.head.weight);
        out.push(&mut self.head.bias);
        out
    }

    pub fn scalar_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn add_assign(&mut self, other: &ParamStore<R>) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            a.add_assign(b);
        }
    }

    pub fn scale(&mut self, s: R) {
        self.tensors_mut().into_iter().for_each(|t| t.scale(s));
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.is_finite())
    }

    pub fn cast<S: Real>(&self) -> ParamStore<S> {
        let conv = |p: &ConvParams<R>| ConvParams {
            kernel: p.kernel.cast(),
            bias: p.bias.cast(),
            dilation: p.dilation,
        };
        ParamStore {
            entry: conv(&self.entry),
            blocks: self
                .blocks
                .iter()
                .map(|b| GcbParams {
                    levels: b
                        .levels
                        .iter()
                        .map(|lv| {
                            lv.iter()
                                .map(|g| GscbParams {
                                    value: conv(&g.value),
                                    gate: conv(&g.gate),
                                })
                                .collect()
                        })
                        .collect(),
                })
                .collect(),
            head: DenseParams {
                weight: self.head.weight.cast(),
                bias: self.head.bias.cast(),
            },
        }
    }

    /// Builds a store for `cfg` from named tensors, rejecting any missing,
    /// extra, or mis-shaped entry.
    pub fn from_named(cfg: &ModelConfig, named: Vec<(String, Tensor<R>)>) -> Result<Self> {
        let mut store = Self::zeros(cfg);
        let expected: Vec<(String, Vec<usize>)> = store
            .named()
            .into_iter()
            .map(|(n, t)| (n, t.shape().to_vec()))
            .collect();
        if named.len() != expected.len() {
            return Err(Error::Shape(format!(
                "config needs {} tensors, got {}",
                expected.len(),
                named.len()
            )));
        }
        for ((name, shape), (got_name, got)) in expected.iter().zip(&named) {
            if name != got_name {
                return Err(Error::Shape(format!("expected tensor {}, found {}", name, got_name)));
            }
            if got.shape() != shape.as_slice() {
                return Err(Error::Shape(format!(
                    "{}: expected shape {:?}, found {:?}",
                    name,
                    shape,
                    got.shape()
                )));
            }
        }
        for (slot, (_, t)) in store.tensors_mut().into_iter().zip(named) {
            *slot = t;
        }
        Ok(store)
    }
}
