use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Head, ModelConfig, TensorRole};
use crate::complex_nn::{Tensor, WeightStore};
use crate::error::{Error, Result};

/// Options for [`random_weights`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitOptions {
    pub seed: u64,
    /// Weights and biases are drawn uniformly from `[-scale, scale]`.
    pub scale: f32,
    pub zero_bias: bool,
}

impl Default for InitOptions {
    fn default() -> Self {
        InitOptions {
            seed: 0,
            scale: 0.1,
            zero_bias: false,
        }
    }
}

impl InitOptions {
    pub fn seeded(seed: u64) -> Self {
        InitOptions {
            seed,
            ..Self::default()
        }
    }
}

const PRELU_INIT: f32 = 0.25;

fn fill(cfg: &ModelConfig, mut value: impl FnMut(&str, TensorRole, usize) -> f32) -> WeightStore {
    let mut store = WeightStore::new();
    for entry in cfg.tensor_manifest() {
        let n: usize = entry.shape.iter().product();
        let data = (0..n).map(|i| value(&entry.path, entry.role, i)).collect();
        let tensor = Tensor::new(entry.shape, data).expect("manifest shape matches data");
        store.insert(entry.path, tensor);
    }
    store
}

fn fixed_value(role: TensorRole) -> Option<f32> {
    match role {
        TensorRole::BnMean | TensorRole::BnBeta => Some(0.0),
        TensorRole::BnVar | TensorRole::BnGamma => Some(1.0),
        TensorRole::PreluSlope => Some(PRELU_INIT),
        TensorRole::Weight | TensorRole::Bias => None,
    }
}

/// Deterministic random weights for every tensor of `cfg`.
///
/// Batch norm starts at identity statistics and PReLU slopes at 0.25, so a
/// freshly initialized model is well conditioned for tests.
pub fn random_weights(cfg: &ModelConfig, opts: InitOptions) -> WeightStore {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let s = opts.scale;
    fill(cfg, |_, role, _| match (fixed_value(role), role) {
        (Some(v), _) => v,
        (None, TensorRole::Bias) if opts.zero_bias => 0.0,
        _ => rng.gen_range(-s..=s),
    })
}

/// Weights under which a mask-head model reproduces its input spectrum.
///
/// Every weight and bias is zero except the real bias of the last decoder
/// block, set to 20: the mask estimate is then `20 + 0i` for every bin and
/// its bounded magnitude `tanh(20)` rounds to exactly 1 in single precision.
pub fn identity_mask_weights(cfg: &ModelConfig) -> Result<WeightStore> {
    if cfg.head != Head::Mask {
        return Err(Error::InvalidModelConfig(
            "identity weights need a mask head".into(),
        ));
    }
    let last = format!("decoder.{}.deconv.real.bias", cfg.decoder_blocks.len() - 1);
    Ok(fill(cfg, |path, role, _| {
        fixed_value(role).unwrap_or(if path == last { 20.0 } else { 0.0 })
    }))
}

/// All-zero weights and biases with identity normalization.
pub fn zero_weights(cfg: &ModelConfig) -> WeightStore {
    fill(cfg, |_, role, _| fixed_value(role).unwrap_or(0.0))
}
