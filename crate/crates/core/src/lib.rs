//! Gated multi-scale temporal convolutional network for speech emotion
//! recognition: MFCC front end, model, training, metrics and analysis tools.

pub mod error;
pub mod ndcore;

pub use error::{Error, Result};
pub use ndcore::{AdamConfig, AdamState, ConvParams, DenseParams, Real, Tensor};
pub mod dsp;
pub mod kv;
pub mod model;
pub mod corpus;
pub mod metrics;
pub mod trainer;
pub mod analysis;
