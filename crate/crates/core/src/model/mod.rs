//! Network configuration, parameters, forward/reverse passes, structural
//! calculators and checkpoints.

pub mod checkpoint;
mod config;
mod network;
mod params;
mod structure;

pub use checkpoint::{checkpoint_load, checkpoint_save, Checkpoint, TrainingMeta};
pub use config::{DrdScheme, ModelConfig, SkipMode, MODEL_KEYS};
pub use network::{
    accumulate_example, backward, forward, forward_trace, gcb_forward, gscb_forward, ExampleGrad, ForwardTrace,
    GcbTrace,
};
pub use params::{GcbParams, GscbParams, ParamStore};
pub use structure::{param_count, receptive_field, ReceptiveField};
