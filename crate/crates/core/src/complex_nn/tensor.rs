use crate::error::{Error, Result};

/// Complex activation tensor of logical shape `(channels, freq, time)`.
///
/// Real and imaginary parts are stored separately, time-major: element
/// `(c, f, t)` lives at `(t * channels + c) * freq + f`, so one time step is a
/// contiguous `channels * freq` slice.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexTensor {
    channels: usize,
    freq: usize,
    time: usize,
    re: Vec<f32>,
    im: Vec<f32>,
}

impl ComplexTensor {
    pub fn zeros(channels: usize, freq: usize, time: usize) -> Self {
        let n = channels * freq * time;
        ComplexTensor {
            channels,
            freq,
            time,
            re: vec![0.0; n],
            im: vec![0.0; n],
        }
    }

    pub fn from_parts(
        channels: usize,
        freq: usize,
        time: usize,
        re: Vec<f32>,
        im: Vec<f32>,
    ) -> Result<Self> {
        let n = channels * freq * time;
        if re.len() != n || im.len() != n {
            return Err(Error::LengthMismatch {
                what: "complex tensor parts",
                expected: n,
                got: re.len().max(im.len()),
            });
        }
        Ok(ComplexTensor {
            channels,
            freq,
            time,
            re,
            im,
        })
    }

    /// Builds a tensor from a function of `(c, f, t)`.
    pub fn from_fn(
        channels: usize,
        freq: usize,
        time: usize,
        mut f: impl FnMut(usize, usize, usize) -> (f32, f32),
    ) -> Self {
        let mut x = ComplexTensor::zeros(channels, freq, time);
        for t in 0..time {
            for c in 0..channels {
                for k in 0..freq {
                    let (re, im) = f(c, k, t);
                    x.set(c, k, t, re, im);
                }
            }
        }
        x
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.channels, self.freq, self.time]
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn freq(&self) -> usize {
        self.freq
    }

    pub fn time(&self) -> usize {
        self.time
    }

    #[inline]
    fn index(&self, c: usize, f: usize, t: usize) -> usize {
        (t * self.channels + c) * self.freq + f
    }

    pub fn get(&self, c: usize, f: usize, t: usize) -> (f32, f32) {
        let i = self.index(c, f, t);
        (self.re[i], self.im[i])
    }

    pub fn set(&mut self, c: usize, f: usize, t: usize, re: f32, im: f32) {
        let i = self.index(c, f, t);
        self.re[i] = re;
        self.im[i] = im;
    }

    pub fn re(&self) -> &[f32] {
        &self.re
    }

    pub fn im(&self) -> &[f32] {
        &self.im
    }

    pub fn parts_mut(&mut self) -> (&mut [f32], &mut [f32]) {
        (&mut self.re, &mut self.im)
    }

    pub fn into_parts(self) -> (Vec<f32>, Vec<f32>) {
        (self.re, self.im)
    }

    /// Contiguous `(re, im)` slices of one time step.
    pub fn time_slice(&self, t: usize) -> (&[f32], &[f32]) {
        let n = self.channels * self.freq;
        (&self.re[t * n..(t + 1) * n], &self.im[t * n..(t + 1) * n])
    }

    pub fn time_slice_mut(&mut self, t: usize) -> (&mut [f32], &mut [f32]) {
        let n = self.channels * self.freq;
        (
            &mut self.re[t * n..(t + 1) * n],
            &mut self.im[t * n..(t + 1) * n],
        )
    }

    /// Copies time step `t` out as a single-step tensor.
    pub fn frame(&self, t: usize) -> ComplexTensor {
        let (re, im) = self.time_slice(t);
        ComplexTensor {
            channels: self.channels,
            freq: self.freq,
            time: 1,
            re: re.to_vec(),
            im: im.to_vec(),
        }
    }

    /// Stacks single-step tensors along time.
    pub fn stack_time(frames: &[ComplexTensor]) -> Result<ComplexTensor> {
        let Some(first) = frames.first() else {
            return Ok(ComplexTensor::zeros(0, 0, 0));
        };
        let (c, f) = (first.channels, first.freq);
        let mut out = ComplexTensor::zeros(c, f, 0);
        for fr in frames {
            if fr.channels != c || fr.freq != f {
                return Err(Error::shape(
                    "stack_time",
                    &[c, f, fr.time],
                    &fr.shape(),
                ));
            }
            out.re.extend_from_slice(&fr.re);
            out.im.extend_from_slice(&fr.im);
            out.time += fr.time;
        }
        Ok(out)
    }

    /// Concatenates along channels (`self` first).
    pub fn concat_channels(&self, other: &ComplexTensor) -> Result<ComplexTensor> {
        if self.freq != other.freq || self.time != other.time {
            return Err(Error::shape(
                "concat_channels",
                &[other.channels, self.freq, self.time],
                &other.shape(),
            ));
        }
        let c = self.channels + other.channels;
        let mut out = ComplexTensor::zeros(c, self.freq, self.time);
        let (na, nb) = (self.channels * self.freq, other.channels * self.freq);
        for t in 0..self.time {
            let (ar, ai) = self.time_slice(t);
            let (br, bi) = other.time_slice(t);
            let (or, oi) = out.time_slice_mut(t);
            or[..na].copy_from_slice(ar);
            or[na..na + nb].copy_from_slice(br);
            oi[..na].copy_from_slice(ai);
            oi[na..na + nb].copy_from_slice(bi);
        }
        Ok(out)
    }

    /// Elementwise sum.
    pub fn add(&self, other: &ComplexTensor) -> Result<ComplexTensor> {
        if self.shape() != other.shape() {
            return Err(Error::shape("add", &self.shape(), &other.shape()));
        }
        let mut out = self.clone();
        for (a, b) in out.re.iter_mut().zip(&other.re) {
            *a += b;
        }
        for (a, b) in out.im.iter_mut().zip(&other.im) {
            *a += b;
        }
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.re.iter().chain(&self.im).all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f32 {
        self.re
            .iter()
            .chain(&self.im)
            .fold(0.0f32, |m, v| m.max(v.abs()))
    }
}
