use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complex_nn::{ComplexConv2d, ComplexDeconv2d, LayerKind, LayerSpec};
use crate::error::{Error, Result};
use crate::framing::{FrameConfig, Summation, SynthesisMode};

/// Output stage of the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Head {
    /// Bounded complex ratio mask applied to the noisy spectrum.
    Mask,
    /// Direct spectral estimate through a trailing complex linear layer.
    Signal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    Single,
    /// `K = W / P` frames per step: the current frame and `K - 1` past ones.
    Overlapped,
}

/// The architecture switches that distinguish the model variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variant {
    pub head: Head,
    pub causal: bool,
    pub prediction: Prediction,
    pub summation: Summation,
    pub pathways: bool,
}

impl Variant {
    /// Mask head, non-causal, single-frame: the reference layout.
    pub const BASELINE: Variant = Variant {
        head: Head::Mask,
        causal: false,
        prediction: Prediction::Single,
        summation: Summation::Partial,
        pathways: false,
    };

    /// Signal head, causal, full-summation overlapped prediction with pathways.
    pub const PROPOSED: Variant = Variant {
        head: Head::Signal,
        causal: true,
        prediction: Prediction::Overlapped,
        summation: Summation::Full,
        pathways: true,
    };

    /// Every head x causality x prediction combination, followed by the
    /// causal signal-based overlapped model with pathways.
    pub fn table(summation: Summation) -> Vec<Variant> {
        let mut out = Vec::new();
        for head in [Head::Mask, Head::Signal] {
            for causal in [false, true] {
                for prediction in [Prediction::Single, Prediction::Overlapped] {
                    out.push(Variant {
                        head,
                        causal,
                        prediction,
                        summation,
                        pathways: false,
                    });
                }
            }
        }
        out.push(Variant {
            summation,
            ..Variant::PROPOSED
        });
        out
    }

    pub fn label(&self) -> String {
        let pred = match (self.prediction, self.summation) {
            (Prediction::Single, _) => "single-frame",
            (Prediction::Overlapped, Summation::Partial) => "overlapped (partial)",
            (Prediction::Overlapped, Summation::Full) => "overlapped (full)",
        };
        format!(
            "{}, {}, {}{}",
            match self.head {
                Head::Mask => "mask",
                Head::Signal => "signal",
            },
            if self.causal { "causal" } else { "non-causal" },
            pred,
            if self.pathways { ", +CP" } else { "" }
        )
    }
}

/// Non-causal look-ahead of the reference layout, in frames.
pub const DEFAULT_LOOKAHEAD_FRAMES: usize = 2;

/// Complete architecture description; serialized into weight files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub head: Head,
    pub causal: bool,
    pub prediction: Prediction,
    pub summation: Summation,
    pub pathways: bool,
    pub frame: FrameConfig,
    /// Frames of look-ahead of the whole network; zero when causal.
    pub lookahead_frames: usize,
    pub encoder_blocks: Vec<LayerSpec>,
    pub decoder_blocks: Vec<LayerSpec>,
    pub lstm_layers: usize,
    pub lstm_hidden: usize,
    pub dense_units: usize,
}

/// One parameter or statistics tensor required by a configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorEntry {
    pub path: String,
    pub shape: Vec<usize>,
    pub role: TensorRole,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorRole {
    Weight,
    Bias,
    BnMean,
    BnVar,
    BnGamma,
    BnBeta,
    PreluSlope,
}

impl TensorRole {
    /// Running statistics are buffers, not trainable parameters.
    pub fn is_parameter(self) -> bool {
        !matches!(self, TensorRole::BnMean | TensorRole::BnVar)
    }
}

const ENCODER_CHANNELS: [usize; 7] = [1, 16, 32, 64, 128, 128, 128];

impl ModelConfig {
    /// The adopted layer layout: six complex conv blocks with kernel (5, 2)
    /// and frequency stride 2, a two-layer complex LSTM with 128 hidden units
    /// per part, and a mirrored decoder.
    pub fn adopted(variant: Variant) -> Self {
        Self::from_layout(
            variant,
            FrameConfig::default(),
            &ENCODER_CHANNELS,
            (5, 2),
            2,
            2,
            DEFAULT_LOOKAHEAD_FRAMES,
            2,
            128,
        )
        .expect("adopted layout is valid")
    }

    /// Derives encoder and decoder blocks from a channel progression.
    ///
    /// Non-causal look-ahead is placed in the first `lookahead_frames` encoder
    /// blocks, one frame each; causal models pad every encoder block on the
    /// left and reduce the decoder time kernel to 1.
    #[allow(clippy::too_many_arguments)]
    pub fn from_layout(
        variant: Variant,
        frame: FrameConfig,
        channels: &[usize],
        kernel: (usize, usize),
        freq_stride: usize,
        freq_padding: usize,
        lookahead_frames: usize,
        lstm_layers: usize,
        lstm_hidden: usize,
    ) -> Result<Self> {
        frame.validate()?;
        let n = channels.len().saturating_sub(1);
        let (kf, kt) = kernel;
        let lookahead = if variant.causal { 0 } else { lookahead_frames };
        if lookahead > n || (lookahead > 0 && kt < 2) {
            return Err(Error::InvalidModelConfig(format!(
                "cannot place {lookahead} look-ahead frames in {n} blocks of time kernel {kt}"
            )));
        }
        let encoder_blocks: Vec<LayerSpec> = (0..n)
            .map(|i| {
                let past = if i < lookahead { kt - 2 } else { kt - 1 };
                LayerSpec::conv2d(
                    channels[i],
                    channels[i + 1],
                    kernel,
                    (freq_stride, 1),
                    (freq_padding, past),
                )
            })
            .collect();
        let mut freqs = vec![frame.frame_len / 2];
        for b in &encoder_blocks {
            freqs.push(b.out_freq(*freqs.last().unwrap())?);
        }
        let frames_out = match variant.prediction {
            Prediction::Single => 1,
            Prediction::Overlapped => frame.overlap(),
        };
        let dkt = if variant.causal { 1 } else { kt };
        let decoder_blocks = (0..n)
            .map(|j| {
                let enc = n - 1 - j;
                let skip = channels[enc + 1];
                let input = if variant.pathways { skip } else { 2 * skip };
                let output = if j == n - 1 { frames_out } else { channels[enc] };
                let (fin, ftarget) = (freqs[enc + 1], freqs[enc]);
                let base = (fin - 1) * freq_stride + kf;
                let out_pad = (ftarget + 2 * freq_padding).checked_sub(base).ok_or_else(|| {
                    Error::InvalidModelConfig(format!("decoder.{j}: cannot reach {ftarget} bins"))
                })?;
                Ok(LayerSpec::deconv2d(
                    input,
                    output,
                    (kf, dkt),
                    (freq_stride, 1),
                    (freq_padding, dkt - 1),
                    (out_pad, 0),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let cfg = ModelConfig {
            head: variant.head,
            causal: variant.causal,
            prediction: variant.prediction,
            summation: variant.summation,
            pathways: variant.pathways,
            frame,
            lookahead_frames: lookahead,
            encoder_blocks,
            decoder_blocks,
            lstm_layers,
            lstm_hidden,
            dense_units: channels[n] * freqs[n],
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same channel progression and kernels under different switches.
    pub fn with_variant(&self, variant: Variant) -> Result<Self> {
        let mut channels = vec![self.encoder_blocks[0].in_channels];
        channels.extend(self.encoder_blocks.iter().map(|b| b.out_channels));
        let e0 = &self.encoder_blocks[0];
        let lookahead = if self.causal {
            DEFAULT_LOOKAHEAD_FRAMES
        } else {
            self.lookahead_frames
        };
        Self::from_layout(
            variant,
            self.frame.clone(),
            &channels,
            e0.kernel,
            e0.stride.0,
            e0.padding.0,
            lookahead,
            self.lstm_layers,
            self.lstm_hidden,
        )
    }

    pub fn variant(&self) -> Variant {
        Variant {
            head: self.head,
            causal: self.causal,
            prediction: self.prediction,
            summation: self.summation,
            pathways: self.pathways,
        }
    }

    /// Frames emitted per step: 1 or `K`.
    pub fn frames_per_step(&self) -> usize {
        match self.prediction {
            Prediction::Single => 1,
            Prediction::Overlapped => self.frame.overlap(),
        }
    }

    /// Network frequency bins (Nyquist omitted).
    pub fn net_bins(&self) -> usize {
        self.frame.frame_len / 2
    }

    pub fn synthesis_mode(&self) -> SynthesisMode {
        match (self.prediction, self.summation) {
            (Prediction::Single, _) => SynthesisMode::SingleFrame,
            (Prediction::Overlapped, Summation::Partial) => SynthesisMode::PartialSum,
            (Prediction::Overlapped, Summation::Full) => SynthesisMode::FullSum,
        }
    }

    /// Frequency size after each encoder block, starting with the input.
    pub fn encoder_freqs(&self) -> Result<Vec<usize>> {
        let mut freqs = vec![self.net_bins()];
        for b in &self.encoder_blocks {
            freqs.push(b.out_freq(*freqs.last().unwrap())?);
        }
        Ok(freqs)
    }

    /// Per-block output delays (frames) of encoder and decoder, derived from
    /// the layer receptive fields.
    pub fn block_delays(&self) -> (Vec<usize>, Vec<usize>) {
        let mut enc = Vec::with_capacity(self.encoder_blocks.len());
        let mut d = 0;
        for b in &self.encoder_blocks {
            d += b.lookahead();
            enc.push(d);
        }
        let mut dec = Vec::with_capacity(self.decoder_blocks.len());
        let n = self.encoder_blocks.len();
        let mut prev = d;
        for (j, b) in self.decoder_blocks.iter().enumerate() {
            let skip = enc[n - 1 - j];
            prev = prev.max(skip) + b.lookahead();
            dec.push(prev);
        }
        (enc, dec)
    }

    /// Total network look-ahead in frames.
    pub fn receptive_lookahead(&self) -> usize {
        self.block_delays().1.last().copied().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModelConfig(m));
        self.frame.validate()?;
        if self.encoder_blocks.len() != 6 || self.decoder_blocks.len() != 6 {
            return bad(format!(
                "expected six encoder and six decoder blocks, got {} and {}",
                self.encoder_blocks.len(),
                self.decoder_blocks.len()
            ));
        }
        if self.lstm_layers == 0 || self.lstm_hidden == 0 {
            return bad("lstm must have at least one layer and one unit".into());
        }
        for (i, b) in self.encoder_blocks.iter().enumerate() {
            let path = format!("encoder.{i}.conv");
            if b.kind != LayerKind::Conv2d {
                return bad(format!("{path}: expected conv2d"));
            }
            b.validate(&path)?;
            if self.causal && !b.causal {
                return bad(format!("{path}: causal model needs left-only time padding"));
            }
            let prev_out = if i == 0 { 1 } else { self.encoder_blocks[i - 1].out_channels };
            if b.in_channels != prev_out {
                return bad(format!("{path}: input channels {} != {prev_out}", b.in_channels));
            }
        }
        let freqs = self.encoder_freqs()?;
        let n = self.encoder_blocks.len();
        let c_last = self.encoder_blocks[n - 1].out_channels;
        if self.dense_units != c_last * freqs[n] {
            return bad(format!(
                "dense units {} != bottleneck size {} x {}",
                self.dense_units, c_last, freqs[n]
            ));
        }
        let mut prev_out = c_last;
        for (j, b) in self.decoder_blocks.iter().enumerate() {
            let path = format!("decoder.{j}.deconv");
            if b.kind != LayerKind::Deconv2d {
                return bad(format!("{path}: expected deconv2d"));
            }
            b.validate(&path)?;
            if self.causal && (b.kernel.1 != 1 || !b.causal) {
                return bad(format!("{path}: causal model needs kernel.time == 1"));
            }
            let skip = self.encoder_blocks[n - 1 - j].out_channels;
            let expected_in = if self.pathways {
                if skip != prev_out {
                    return bad(format!("{path}: pathway needs {skip} == {prev_out} channels"));
                }
                prev_out
            } else {
                prev_out + skip
            };
            if b.in_channels != expected_in {
                return bad(format!("{path}: input channels {} != {expected_in}", b.in_channels));
            }
            let want_out = if j == n - 1 {
                self.frames_per_step()
            } else {
                self.encoder_blocks[n - 1 - j].in_channels
            };
            if b.out_channels != want_out {
                return bad(format!("{path}: output channels {} != {want_out}", b.out_channels));
            }
            let fout = b.out_freq(freqs[n - j])?;
            if fout != freqs[n - 1 - j] {
                return bad(format!("{path}: produces {fout} bins, skip needs {}", freqs[n - 1 - j]));
            }
            prev_out = b.out_channels;
        }
        let derived = self.receptive_lookahead();
        if self.causal && derived != 0 {
            return bad(format!("causal model has {derived} frames of look-ahead"));
        }
        if derived != self.lookahead_frames {
            return bad(format!(
                "configured look-ahead {} frames, layers give {derived}",
                self.lookahead_frames
            ));
        }
        Ok(())
    }

    /// Every layer with its canonical path, in forward order.
    pub fn layer_specs(&self) -> Vec<(String, LayerSpec)> {
        let mut out = Vec::new();
        for (i, b) in self.encoder_blocks.iter().enumerate() {
            out.push((format!("encoder.{i}.conv"), b.clone()));
            out.push((format!("encoder.{i}.bn"), LayerSpec::batchnorm(b.out_channels)));
            out.push((format!("encoder.{i}.prelu"), LayerSpec::prelu(b.out_channels)));
        }
        for l in 0..self.lstm_layers {
            let input = if l == 0 { self.dense_units } else { self.lstm_hidden };
            out.push((format!("lstm.{l}"), LayerSpec::lstm(input, self.lstm_hidden)));
        }
        out.push(("dense".into(), LayerSpec::linear(self.lstm_hidden, self.dense_units)));
        let n = self.encoder_blocks.len();
        if self.pathways {
            for j in 0..n {
                let c = self.encoder_blocks[n - 1 - j].out_channels;
                out.push((format!("pathway.{j}.conv"), LayerSpec::pathway(c)));
            }
        }
        for (j, b) in self.decoder_blocks.iter().enumerate() {
            out.push((format!("decoder.{j}.deconv"), b.clone()));
            if j + 1 < n {
                out.push((format!("decoder.{j}.bn"), LayerSpec::batchnorm(b.out_channels)));
                out.push((format!("decoder.{j}.prelu"), LayerSpec::prelu(b.out_channels)));
            }
        }
        if self.head == Head::Signal {
            let f = self.net_bins();
            out.push(("head.linear".into(), LayerSpec::linear(f, f)));
        }
        out
    }

    /// All tensors a weight store must provide for this configuration.
    pub fn tensor_manifest(&self) -> Vec<TensorEntry> {
        let mut out = Vec::new();
        let mut push = |path: String, shape: Vec<usize>, role| out.push(TensorEntry { path, shape, role });
        for (path, spec) in self.layer_specs() {
            let (i, o) = (spec.in_channels, spec.out_channels);
            for part in ["real", "imag"] {
                let p = format!("{path}.{part}");
                match spec.kind {
                    LayerKind::Conv2d | LayerKind::Conv1x1Pathway => {
                        push(format!("{p}.weight"), ComplexConv2d::weight_shape(&spec).to_vec(), TensorRole::Weight);
                        push(format!("{p}.bias"), vec![o], TensorRole::Bias);
                    }
                    LayerKind::Deconv2d => {
                        push(format!("{p}.weight"), ComplexDeconv2d::weight_shape(&spec).to_vec(), TensorRole::Weight);
                        push(format!("{p}.bias"), vec![o], TensorRole::Bias);
                    }
                    LayerKind::Linear => {
                        push(format!("{p}.weight"), vec![o, i], TensorRole::Weight);
                        push(format!("{p}.bias"), vec![o], TensorRole::Bias);
                    }
                    LayerKind::Lstm => {
                        push(format!("{p}.weight_ih"), vec![4 * o, i], TensorRole::Weight);
                        push(format!("{p}.weight_hh"), vec![4 * o, o], TensorRole::Weight);
                        push(format!("{p}.bias_ih"), vec![4 * o], TensorRole::Bias);
                        push(format!("{p}.bias_hh"), vec![4 * o], TensorRole::Bias);
                    }
                    LayerKind::Batchnorm => {
                        push(format!("{p}.weight"), vec![o], TensorRole::BnGamma);
                        push(format!("{p}.bias"), vec![o], TensorRole::BnBeta);
                        push(format!("{p}.running_mean"), vec![o], TensorRole::BnMean);
                        push(format!("{p}.running_var"), vec![o], TensorRole::BnVar);
                    }
                    LayerKind::Prelu => {
                        push(format!("{p}.weight"), vec![o], TensorRole::PreluSlope);
                    }
                }
            }
        }
        out
    }

    /// SHA-256 of the compact JSON form with sorted keys.
    pub fn config_hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let bytes = serde_json::to_vec(&value).expect("value serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Exact count of trainable real scalars (weights, biases, affine
/// parameters and PReLU slopes; batch-norm running statistics excluded).
pub fn count_parameters(cfg: &ModelConfig) -> usize {
    cfg.layer_specs().iter().map(|(_, s)| s.param_count()).sum()
}
