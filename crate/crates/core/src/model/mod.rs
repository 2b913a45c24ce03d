//! Network configuration, weights and inference.

pub mod config;
pub mod estimator;
pub mod init;
pub mod network;
pub mod pipeline;

pub use config::{
    count_parameters, Head, ModelConfig, Prediction, TensorEntry, TensorRole, Variant,
    DEFAULT_LOOKAHEAD_FRAMES,
};
pub use estimator::{FrameEstimator, IdentityEstimator};
pub use init::{identity_mask_weights, random_weights, zero_weights, InitOptions};
pub use network::{bounded_mask, FrameStack, Model, ModelState, Trace};
pub use pipeline::{enhance_offline, padded_length, FramePipeline};
