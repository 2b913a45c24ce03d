use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Conv2d,
    Deconv2d,
    Lstm,
    Linear,
    Batchnorm,
    Prelu,
    Conv1x1Pathway,
}

/// Shape description of one complex layer.
///
/// `kernel`, `stride` and `padding` are `(freq, time)` pairs. Along time every
/// convolution preserves the sequence length: `padding.1` is the number of
/// past frames inside the receptive field and the remaining
/// `kernel.1 - 1 - padding.1` taps look ahead. Along frequency, `padding.0` is
/// the usual symmetric zero padding (convolution) or output cropping
/// (transposed convolution), with `output_padding` extra bins appended by a
/// transposed convolution.
///
/// For `lstm`, `in_channels` is the per-part input width and `out_channels` the
/// hidden size; for `linear` they are the per-part feature widths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub in_channels: usize,
    pub out_channels: usize,
    #[serde(default = "unit_pair")]
    pub kernel: (usize, usize),
    #[serde(default = "unit_pair")]
    pub stride: (usize, usize),
    #[serde(default)]
    pub padding: (usize, usize),
    #[serde(default)]
    pub output_padding: (usize, usize),
    #[serde(default)]
    pub causal: bool,
}

fn unit_pair() -> (usize, usize) {
    (1, 1)
}

impl LayerSpec {
    pub fn conv2d(
        in_channels: usize,
        out_channels: usize,
        kernel: (usize, usize),
        stride: (usize, usize),
        padding: (usize, usize),
    ) -> Self {
        LayerSpec {
            kind: LayerKind::Conv2d,
            in_channels,
            out_channels,
            kernel,
            stride,
            padding,
            output_padding: (0, 0),
            causal: padding.1 + 1 == kernel.1,
        }
    }

    pub fn deconv2d(
        in_channels: usize,
        out_channels: usize,
        kernel: (usize, usize),
        stride: (usize, usize),
        padding: (usize, usize),
        output_padding: (usize, usize),
    ) -> Self {
        LayerSpec {
            kind: LayerKind::Deconv2d,
            in_channels,
            out_channels,
            kernel,
            stride,
            padding,
            output_padding,
            causal: kernel.1 == 1,
        }
    }

    pub fn pathway(channels: usize) -> Self {
        LayerSpec {
            kind: LayerKind::Conv1x1Pathway,
            in_channels: channels,
            out_channels: channels,
            kernel: (1, 1),
            stride: (1, 1),
            padding: (0, 0),
            output_padding: (0, 0),
            causal: true,
        }
    }

    fn simple(kind: LayerKind, in_channels: usize, out_channels: usize) -> Self {
        LayerSpec {
            kind,
            in_channels,
            out_channels,
            kernel: (1, 1),
            stride: (1, 1),
            padding: (0, 0),
            output_padding: (0, 0),
            causal: true,
        }
    }

    pub fn batchnorm(channels: usize) -> Self {
        Self::simple(LayerKind::Batchnorm, channels, channels)
    }

    pub fn prelu(channels: usize) -> Self {
        Self::simple(LayerKind::Prelu, channels, channels)
    }

    pub fn lstm(input: usize, hidden: usize) -> Self {
        Self::simple(LayerKind::Lstm, input, hidden)
    }

    pub fn linear(input: usize, output: usize) -> Self {
        Self::simple(LayerKind::Linear, input, output)
    }

    /// Frames of look-ahead along time.
    pub fn lookahead(&self) -> usize {
        (self.kernel.1 - 1).saturating_sub(self.padding.1)
    }

    /// Output frequency size for `input` bins.
    pub fn out_freq(&self, input: usize) -> Result<usize> {
        let (k, s, p) = (self.kernel.0, self.stride.0, self.padding.0);
        match self.kind {
            LayerKind::Conv2d | LayerKind::Conv1x1Pathway => {
                let padded = input + 2 * p;
                if padded < k {
                    return Err(Error::InvalidModelConfig(format!(
                        "kernel {k} larger than padded input {padded}"
                    )));
                }
                Ok((padded - k) / s + 1)
            }
            LayerKind::Deconv2d => {
                let full = (input.max(1) - 1) * s + k + self.output_padding.0;
                full.checked_sub(2 * p).ok_or_else(|| {
                    Error::InvalidModelConfig(format!("padding {p} crops more than output {full}"))
                })
            }
            _ => Ok(input),
        }
    }

    /// Real scalars held by the layer's trainable parameters (both parts).
    pub fn param_count(&self) -> usize {
        let (i, o) = (self.in_channels, self.out_channels);
        match self.kind {
            LayerKind::Conv2d | LayerKind::Deconv2d | LayerKind::Conv1x1Pathway => {
                2 * i * o * self.kernel.0 * self.kernel.1 + 2 * o
            }
            // two real sub-LSTMs, each with PyTorch's double bias
            LayerKind::Lstm => 2 * (4 * o * (i + o) + 8 * o),
            LayerKind::Linear => 2 * i * o + 2 * o,
            LayerKind::Batchnorm => 4 * o,
            LayerKind::Prelu => 2 * o,
        }
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModelConfig(format!("{path}: {msg}")));
        if self.in_channels == 0 || self.out_channels == 0 {
            return bad("channel counts must be positive".into());
        }
        if self.kernel.0 == 0 || self.kernel.1 == 0 || self.stride.0 == 0 || self.stride.1 == 0 {
            return bad("kernel and stride must be positive".into());
        }
        match self.kind {
            LayerKind::Conv2d | LayerKind::Deconv2d | LayerKind::Conv1x1Pathway => {
                if self.stride.1 != 1 {
                    return bad("time stride must be 1".into());
                }
                if self.padding.1 >= self.kernel.1 {
                    return bad(format!(
                        "time padding {} must be below kernel time {}",
                        self.padding.1, self.kernel.1
                    ));
                }
            }
            _ => {}
        }
        match self.kind {
            LayerKind::Conv2d if self.causal && self.lookahead() != 0 => bad(format!(
                "causal conv needs time padding kernel.time - 1 = {}",
                self.kernel.1 - 1
            )),
            LayerKind::Deconv2d if self.causal && self.kernel.1 != 1 => {
                bad("causal deconv needs kernel.time == 1".into())
            }
            LayerKind::Conv1x1Pathway if self.kernel != (1, 1) => bad("pathway must be 1x1".into()),
            LayerKind::Batchnorm | LayerKind::Prelu if self.in_channels != self.out_channels => {
                bad("per-channel layer must keep channel count".into())
            }
            _ => Ok(()),
        }
    }
}
