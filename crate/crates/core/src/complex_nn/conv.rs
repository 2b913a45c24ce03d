use std::collections::VecDeque;

use super::{ComplexTensor, LayerKind, LayerSpec, WeightStore};
use crate::error::{Error, Result};

type Tap<'a> = Option<(&'a [f32], &'a [f32])>;

/// Complex weights `W = W_re + i W_im` with a complex bias.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexParams {
    pub w_re: Vec<f32>,
    pub w_im: Vec<f32>,
    pub b_re: Vec<f32>,
    pub b_im: Vec<f32>,
}

impl ComplexParams {
    pub fn load(store: &WeightStore, path: &str, shape: &[usize], bias: usize) -> Result<Self> {
        Ok(ComplexParams {
            w_re: store.fetch(&format!("{path}.real.weight"), shape)?,
            w_im: store.fetch(&format!("{path}.imag.weight"), shape)?,
            b_re: store.fetch(&format!("{path}.real.bias"), &[bias])?,
            b_im: store.fetch(&format!("{path}.imag.bias"), &[bias])?,
        })
    }

    fn check(&self, path: &str, shape: &[usize], bias: usize) -> Result<()> {
        let n: usize = shape.iter().product();
        for (part, w) in [("real", &self.w_re), ("imag", &self.w_im)] {
            if w.len() != n {
                return Err(Error::shape(format!("{path}.{part}.weight"), shape, &[w.len()]));
            }
        }
        for (part, b) in [("real", &self.b_re), ("imag", &self.b_im)] {
            if b.len() != bias {
                return Err(Error::shape(format!("{path}.{part}.bias"), &[bias], &[b.len()]));
            }
        }
        Ok(())
    }
}

/// The last `kernel.time` inputs of a streaming convolution, oldest first.
///
/// Slots are empty until filled, which matches zero padding at the start of
/// the sequence.
#[derive(Clone, Debug)]
pub struct TimeHistory {
    slots: VecDeque<Option<ComplexTensor>>,
    pushed: usize,
}

impl TimeHistory {
    pub fn new(len: usize) -> Self {
        TimeHistory {
            slots: (0..len).map(|_| None).collect(),
            pushed: 0,
        }
    }

    pub fn push(&mut self, frame: ComplexTensor) {
        self.slots.pop_front();
        self.slots.push_back(Some(frame));
        self.pushed += 1;
    }

    pub fn pushed(&self) -> usize {
        self.pushed
    }

    fn taps(&self) -> Vec<Tap<'_>> {
        self.slots
            .iter()
            .map(|s| s.as_ref().map(|f| f.time_slice(0)))
            .collect()
    }
}

/// Indices `j` with `0 <= j * stride + offset - pad < limit`.
#[inline]
fn valid_range(stride: usize, offset: usize, pad: usize, limit: usize, count: usize) -> (usize, usize) {
    let lo = if offset >= pad {
        0
    } else {
        (pad - offset).div_ceil(stride)
    };
    let hi = if limit + pad > offset {
        (limit + pad - offset).div_ceil(stride).min(count)
    } else {
        0
    };
    (lo, hi.max(lo))
}

/// Complex 2-D convolution over `(freq, time)`.
///
/// `y = W * x + b` in complex arithmetic: the real part is
/// `conv(x_re, W_re) - conv(x_im, W_im) + b_re` and the imaginary part
/// `conv(x_re, W_im) + conv(x_im, W_re) + b_im`. Weights use the
/// `[out, in, kernel_freq, kernel_time]` layout.
#[derive(Clone, Debug)]
pub struct ComplexConv2d {
    path: String,
    spec: LayerSpec,
    params: ComplexParams,
}

impl ComplexConv2d {
    pub fn new(path: impl Into<String>, spec: LayerSpec, params: ComplexParams) -> Result<Self> {
        let path = path.into();
        if !matches!(spec.kind, LayerKind::Conv2d | LayerKind::Conv1x1Pathway) {
            return Err(Error::InvalidModelConfig(format!("{path}: not a convolution")));
        }
        spec.validate(&path)?;
        params.check(&path, &Self::weight_shape(&spec), spec.out_channels)?;
        Ok(ComplexConv2d { path, spec, params })
    }

    pub fn load(store: &WeightStore, path: &str, spec: LayerSpec) -> Result<Self> {
        let params = ComplexParams::load(store, path, &Self::weight_shape(&spec), spec.out_channels)?;
        Self::new(path, spec, params)
    }

    pub fn weight_shape(spec: &LayerSpec) -> [usize; 4] {
        [spec.out_channels, spec.in_channels, spec.kernel.0, spec.kernel.1]
    }

    pub fn spec(&self) -> &LayerSpec {
        &self.spec
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    fn check_input(&self, x: &ComplexTensor) -> Result<usize> {
        if x.channels() != self.spec.in_channels {
            return Err(Error::shape(
                &self.path,
                &[self.spec.in_channels, x.freq(), x.time()],
                &x.shape(),
            ));
        }
        self.spec.out_freq(x.freq())
    }

    /// Whole-sequence forward pass; the time length is preserved.
    pub fn forward(&self, x: &ComplexTensor) -> Result<ComplexTensor> {
        let fout = self.check_input(x)?;
        let (kt, pt) = (self.spec.kernel.1, self.spec.padding.1);
        let mut y = ComplexTensor::zeros(self.spec.out_channels, fout, x.time());
        for t in 0..x.time() {
            let taps: Vec<Tap<'_>> = (0..kt)
                .map(|k| {
                    let tau = t as isize - pt as isize + k as isize;
                    (tau >= 0 && (tau as usize) < x.time()).then(|| x.time_slice(tau as usize))
                })
                .collect();
            let (yr, yi) = y.time_slice_mut(t);
            self.kernel(&taps, x.freq(), fout, yr, yi);
        }
        Ok(y)
    }

    /// Output for the time step `lookahead` frames before the newest input
    /// held in `history`.
    pub fn step(&self, history: &TimeHistory, freq: usize) -> Result<ComplexTensor> {
        let fout = self.spec.out_freq(freq)?;
        let mut y = ComplexTensor::zeros(self.spec.out_channels, fout, 1);
        let taps = history.taps();
        if taps.len() != self.spec.kernel.1 {
            return Err(Error::LengthMismatch {
                what: "conv time history",
                expected: self.spec.kernel.1,
                got: taps.len(),
            });
        }
        let (yr, yi) = y.time_slice_mut(0);
        self.kernel(&taps, freq, fout, yr, yi);
        Ok(y)
    }

    fn kernel(&self, taps: &[Tap<'_>], fin: usize, fout: usize, out_re: &mut [f32], out_im: &mut [f32]) {
        let s = &self.spec;
        let (co, ci, kf_n, kt_n) = (s.out_channels, s.in_channels, s.kernel.0, s.kernel.1);
        let (sf, pf) = (s.stride.0, s.padding.0);
        let p = &self.params;
        for o in 0..co {
            let yr = &mut out_re[o * fout..(o + 1) * fout];
            let yi = &mut out_im[o * fout..(o + 1) * fout];
            yr.fill(p.b_re[o]);
            yi.fill(p.b_im[o]);
            for i in 0..ci {
                for kf in 0..kf_n {
                    let (lo, hi) = valid_range(sf, kf, pf, fin, fout);
                    for (k, tap) in taps.iter().enumerate() {
                        let Some((xr, xi)) = tap else { continue };
                        let w = ((o * ci + i) * kf_n + kf) * kt_n + k;
                        let (wr, wi) = (p.w_re[w], p.w_im[w]);
                        let xr = &xr[i * fin..(i + 1) * fin];
                        let xi = &xi[i * fin..(i + 1) * fin];
                        for fo in lo..hi {
                            let fi = fo * sf + kf - pf;
                            yr[fo] += wr * xr[fi] - wi * xi[fi];
                            yi[fo] += wi * xr[fi] + wr * xi[fi];
                        }
                    }
                }
            }
        }
    }
}

/// Complex transposed convolution: strided upsampling along frequency,
/// length-preserving along time.
///
/// Weights use the `[in, out, kernel_freq, kernel_time]` layout. Input bin
/// `fi` scatters to output bin `fi * stride + kf - padding`; output time `t`
/// reads input time `t + lookahead - k` through time tap `k`.
#[derive(Clone, Debug)]
pub struct ComplexDeconv2d {
    path: String,
    spec: LayerSpec,
    params: ComplexParams,
}

impl ComplexDeconv2d {
    pub fn new(path: impl Into<String>, spec: LayerSpec, params: ComplexParams) -> Result<Self> {
        let path = path.into();
        if spec.kind != LayerKind::Deconv2d {
            return Err(Error::InvalidModelConfig(format!("{path}: not a deconvolution")));
        }
        spec.validate(&path)?;
        params.check(&path, &Self::weight_shape(&spec), spec.out_channels)?;
        Ok(ComplexDeconv2d { path, spec, params })
    }

    pub fn load(store: &WeightStore, path: &str, spec: LayerSpec) -> Result<Self> {
        let params = ComplexParams::load(store, path, &Self::weight_shape(&spec), spec.out_channels)?;
        Self::new(path, spec, params)
    }

    pub fn weight_shape(spec: &LayerSpec) -> [usize; 4] {
        [spec.in_channels, spec.out_channels, spec.kernel.0, spec.kernel.1]
    }

    pub fn spec(&self) -> &LayerSpec {
        &self.spec
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn forward(&self, x: &ComplexTensor) -> Result<ComplexTensor> {
        if x.channels() != self.spec.in_channels {
            return Err(Error::shape(
                &self.path,
                &[self.spec.in_channels, x.freq(), x.time()],
                &x.shape(),
            ));
        }
        let fout = self.spec.out_freq(x.freq())?;
        let kt = self.spec.kernel.1;
        let ahead = self.spec.lookahead() as isize;
        let mut y = ComplexTensor::zeros(self.spec.out_channels, fout, x.time());
        for t in 0..x.time() {
            let taps: Vec<Tap<'_>> = (0..kt)
                .map(|k| {
                    let tau = t as isize + ahead - k as isize;
                    (tau >= 0 && (tau as usize) < x.time()).then(|| x.time_slice(tau as usize))
                })
                .collect();
            let (yr, yi) = y.time_slice_mut(t);
            self.kernel(&taps, x.freq(), fout, yr, yi);
        }
        Ok(y)
    }

    pub fn step(&self, history: &TimeHistory, freq: usize) -> Result<ComplexTensor> {
        let fout = self.spec.out_freq(freq)?;
        let mut y = ComplexTensor::zeros(self.spec.out_channels, fout, 1);
        let mut taps = history.taps();
        if taps.len() != self.spec.kernel.1 {
            return Err(Error::LengthMismatch {
                what: "deconv time history",
                expected: self.spec.kernel.1,
                got: taps.len(),
            });
        }
        // tap k reads the k-th most recent input
        taps.reverse();
        let (yr, yi) = y.time_slice_mut(0);
        self.kernel(&taps, freq, fout, yr, yi);
        Ok(y)
    }

    fn kernel(&self, taps: &[Tap<'_>], fin: usize, fout: usize, out_re: &mut [f32], out_im: &mut [f32]) {
        let s = &self.spec;
        let (co, ci, kf_n, kt_n) = (s.out_channels, s.in_channels, s.kernel.0, s.kernel.1);
        let (sf, pf) = (s.stride.0, s.padding.0);
        let p = &self.params;
        for o in 0..co {
            let yr = &mut out_re[o * fout..(o + 1) * fout];
            let yi = &mut out_im[o * fout..(o + 1) * fout];
            yr.fill(p.b_re[o]);
            yi.fill(p.b_im[o]);
            for i in 0..ci {
                for kf in 0..kf_n {
                    let (lo, hi) = valid_range(sf, kf, pf, fout, fin);
                    for (k, tap) in taps.iter().enumerate() {
                        let Some((xr, xi)) = tap else { continue };
                        let w = ((i * co + o) * kf_n + kf) * kt_n + k;
                        let (wr, wi) = (p.w_re[w], p.w_im[w]);
                        let xr = &xr[i * fin..(i + 1) * fin];
                        let xi = &xi[i * fin..(i + 1) * fin];
                        for fi in lo..hi {
                            let fo = fi * sf + kf - pf;
                            yr[fo] += wr * xr[fi] - wi * xi[fi];
                            yi[fo] += wi * xr[fi] + wr * xi[fi];
                        }
                    }
                }
            }
        }
    }
}
