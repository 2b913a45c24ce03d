//! Complex-valued layers (forward pass only).
//!
//! Every layer carries separate real and imaginary parameters and combines
//! them with complex arithmetic. Batch normalization and PReLU act on the two
//! parts independently.

mod conv;
mod layer_spec;
mod linear;
mod lstm;
mod norm;
mod tensor;
mod weights;

pub use conv::{ComplexConv2d, ComplexDeconv2d, ComplexParams, TimeHistory};
pub use layer_spec::{LayerKind, LayerSpec};
pub use linear::ComplexLinear;
pub use lstm::{CellState, ComplexLayerState, ComplexLstm, ComplexLstmLayer, ComplexLstmState, LstmCell};
pub use norm::{BatchNormPart, ComplexBatchNorm, ComplexPrelu, BN_EPS};
pub use tensor::ComplexTensor;
pub use weights::{Tensor, WeightStore};

/// Total trainable scalars across `specs`.
pub fn count_layer_parameters<'a>(specs: impl IntoIterator<Item = &'a LayerSpec>) -> usize {
    specs.into_iter().map(LayerSpec::param_count).sum()
}
