//! Deterministic tensor primitives with hand-written gradients and the Adam optimizer.

mod activation;
mod adam;
mod conv;
mod dense;
pub mod gradcheck;
mod init;
mod pool;
mod softmax;
mod tensor;

pub use activation::{leaky_relu, leaky_relu_backward, relu, relu_backward, sigmoid, sigmoid_backward};
pub(crate) use activation::sigmoid_scalar;
pub use adam::{AdamConfig, AdamState};
pub use conv::{conv1d_causal, conv1d_causal_backward, ConvGrads, ConvParams};
pub(crate) use conv::{conv1d_causal_backward_acc, conv1d_causal_into};
pub use dense::{dense, dense_backward, DenseGrads, DenseParams};
pub use init::xavier_uniform;
pub use pool::{global_avg_pool, global_avg_pool_backward, global_avg_pool_masked};
pub use softmax::{cross_entropy, softmax, softmax_cross_entropy};
pub use tensor::{Real, Tensor};
