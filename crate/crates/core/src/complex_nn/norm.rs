use super::{ComplexTensor, WeightStore};
use crate::error::{Error, Result};

pub const BN_EPS: f32 = 1e-5;

/// Inference-time statistics and affine parameters of one part.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchNormPart {
    pub running_mean: Vec<f32>,
    pub running_var: Vec<f32>,
    pub gamma: Vec<f32>,
    pub beta: Vec<f32>,
}

impl BatchNormPart {
    pub fn identity(channels: usize) -> Self {
        BatchNormPart {
            running_mean: vec![0.0; channels],
            running_var: vec![1.0; channels],
            gamma: vec![1.0; channels],
            beta: vec![0.0; channels],
        }
    }
}

/// Split batch normalization: real and imaginary parts are normalized
/// independently, each with its own statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBatchNorm {
    path: String,
    channels: usize,
    eps: f32,
    re: BatchNormPart,
    im: BatchNormPart,
}

impl ComplexBatchNorm {
    pub fn new(path: impl Into<String>, re: BatchNormPart, im: BatchNormPart, eps: f32) -> Result<Self> {
        let path = path.into();
        let channels = re.gamma.len();
        for (part, p) in [("real", &re), ("imag", &im)] {
            for (name, v) in [
                ("running_mean", &p.running_mean),
                ("running_var", &p.running_var),
                ("weight", &p.gamma),
                ("bias", &p.beta),
            ] {
                if v.is_empty() && channels > 0 {
                    return Err(Error::MissingStatistics(format!("{path}.{part}.{name}")));
                }
                if v.len() != channels {
                    return Err(Error::shape(format!("{path}.{part}.{name}"), &[channels], &[v.len()]));
                }
            }
        }
        Ok(ComplexBatchNorm {
            path,
            channels,
            eps,
            re,
            im,
        })
    }

    pub fn load(store: &WeightStore, path: &str, channels: usize) -> Result<Self> {
        let part = |name: &str| -> Result<BatchNormPart> {
            let stat = |t: &str| {
                let key = format!("{path}.{name}.{t}");
                store.fetch(&key, &[channels]).map_err(|e| match e {
                    Error::MissingTensor(k) if t.starts_with("running") => Error::MissingStatistics(k),
                    other => other,
                })
            };
            Ok(BatchNormPart {
                running_mean: stat("running_mean")?,
                running_var: stat("running_var")?,
                gamma: stat("weight")?,
                beta: stat("bias")?,
            })
        };
        Self::new(path, part("real")?, part("imag")?, BN_EPS)
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    /// Normalizes one `channels x freq` time slice in place.
    pub fn apply_slice(&self, re: &mut [f32], im: &mut [f32], freq: usize) {
        for (x, p) in [(re, &self.re), (im, &self.im)] {
            for c in 0..self.channels {
                let std = (p.running_var[c] + self.eps).sqrt();
                let (m, g, b) = (p.running_mean[c], p.gamma[c], p.beta[c]);
                for v in &mut x[c * freq..(c + 1) * freq] {
                    *v = (*v - m) / std * g + b;
                }
            }
        }
    }

    pub fn forward(&self, x: &ComplexTensor) -> Result<ComplexTensor> {
        if x.channels() != self.channels {
            return Err(Error::shape(&self.path, &[self.channels], &[x.channels()]));
        }
        let mut y = x.clone();
        let freq = x.freq();
        for t in 0..x.time() {
            let (re, im) = y.time_slice_mut(t);
            self.apply_slice(re, im, freq);
        }
        Ok(y)
    }
}

/// `x` for `x >= 0`, `slope * x` otherwise; one slope per channel and part.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPrelu {
    path: String,
    slope_re: Vec<f32>,
    slope_im: Vec<f32>,
}

impl ComplexPrelu {
    pub fn new(path: impl Into<String>, slope_re: Vec<f32>, slope_im: Vec<f32>) -> Result<Self> {
        let path = path.into();
        if slope_re.len() != slope_im.len() {
            return Err(Error::shape(
                format!("{path}.imag.weight"),
                &[slope_re.len()],
                &[slope_im.len()],
            ));
        }
        Ok(ComplexPrelu {
            path,
            slope_re,
            slope_im,
        })
    }

    pub fn load(store: &WeightStore, path: &str, channels: usize) -> Result<Self> {
        Self::new(
            path,
            store.fetch(&format!("{path}.real.weight"), &[channels])?,
            store.fetch(&format!("{path}.imag.weight"), &[channels])?,
        )
    }

    pub fn apply_slice(&self, re: &mut [f32], im: &mut [f32], freq: usize) {
        for (x, slopes) in [(re, &self.slope_re), (im, &self.slope_im)] {
            for (c, &a) in slopes.iter().enumerate() {
                for v in &mut x[c * freq..(c + 1) * freq] {
                    if *v < 0.0 {
                        *v *= a;
                    }
                }
            }
        }
    }

    pub fn forward(&self, x: &ComplexTensor) -> Result<ComplexTensor> {
        if x.channels() != self.slope_re.len() {
            return Err(Error::shape(&self.path, &[self.slope_re.len()], &[x.channels()]));
        }
        let mut y = x.clone();
        let freq = x.freq();
        for t in 0..x.time() {
            let (re, im) = y.time_slice_mut(t);
            self.apply_slice(re, im, freq);
        }
        Ok(y)
    }
}
