//! Analysis/synthesis framing.
//!
//! Frames are `W` samples long and advance by `P` samples, so every output
//! sub-frame of `P` samples is covered by `K = W / P` frames. The analysis
//! window `g` is applied before the forward transform; the synthesis window
//! `l` is derived from `g` so that overlap-add reconstructs the input exactly,
//! either from one prediction per covering frame (single-frame and partial
//! summation) or from every accumulated re-prediction (full summation).
//!
//! Transform convention: the forward DFT is unnormalized and the inverse is
//! scaled by `1 / W`, so `istft_frame(stft(x))` returns the windowed frame.

mod overlap_add;
mod transform;
mod window;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use overlap_add::{overlap_add_overlapped, overlap_add_single, OverlapAdder};
pub use transform::{istft_frame, stft, FrameTransform};
pub use window::{
    make_synthesis_window, periodic_hann, window_denominator, SynthesisMode, SynthesisWindow,
};

/// Analysis window family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// Periodic (DFT-even) Hann.
    Hann,
    Rectangular,
    Custom(Vec<f64>),
}

/// How overlapped-frame predictions are combined into output sub-frames.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Summation {
    /// One prediction per covering frame, all made at the current step.
    Partial,
    /// Every prediction of every covering frame made so far.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    /// Frame length `W` in samples; also the FFT size.
    pub frame_len: usize,
    /// Hop `P` in samples.
    pub hop: usize,
    pub sample_rate: u32,
    pub window: WindowKind,
}

impl Default for FrameConfig {
    /// 32 ms Hann frames with an 8 ms hop at 16 kHz.
    fn default() -> Self {
        FrameConfig {
            frame_len: 512,
            hop: 128,
            sample_rate: 16_000,
            window: WindowKind::Hann,
        }
    }
}

impl FrameConfig {
    pub fn new(frame_len: usize, hop: usize, sample_rate: u32, window: WindowKind) -> Result<Self> {
        let cfg = FrameConfig {
            frame_len,
            hop,
            sample_rate,
            window,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Number of frames covering each sub-frame, `K = W / P`.
    pub fn overlap(&self) -> usize {
        self.frame_len / self.hop
    }

    pub fn fft_size(&self) -> usize {
        self.frame_len
    }

    /// One-sided bin count `W / 2 + 1`.
    pub fn bins(&self) -> usize {
        self.frame_len / 2 + 1
    }

    pub fn hop_ms(&self) -> f64 {
        self.hop as f64 * 1000.0 / self.sample_rate as f64
    }

    pub fn analysis_window(&self) -> Vec<f64> {
        match &self.window {
            WindowKind::Hann => periodic_hann(self.frame_len),
            WindowKind::Rectangular => vec![1.0; self.frame_len],
            WindowKind::Custom(g) => g.clone(),
        }
    }

    /// Same geometry with a rectangular analysis window.
    pub fn rectangular(&self) -> Self {
        FrameConfig {
            window: WindowKind::Rectangular,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidFrameConfig(msg));
        if self.hop == 0 || self.frame_len == 0 {
            return bad("frame length and hop must be positive".into());
        }
        if self.frame_len % self.hop != 0 {
            return bad(format!(
                "frame length {} is not a multiple of hop {}",
                self.frame_len, self.hop
            ));
        }
        if self.frame_len % 2 != 0 {
            return bad(format!("frame length {} must be even", self.frame_len));
        }
        if self.sample_rate == 0 {
            return bad("sample rate must be positive".into());
        }
        let g = self.analysis_window();
        if g.len() != self.frame_len {
            return bad(format!(
                "analysis window has {} taps, frame length is {}",
                g.len(),
                self.frame_len
            ));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return bad("analysis window contains non-finite values".into());
        }
        for residue in 0..self.hop {
            if (0..self.overlap()).all(|e| g[e * self.hop + residue] == 0.0) {
                return Err(Error::WindowCondition { index: residue });
            }
        }
        Ok(())
    }
}

/// Complex STFT matrix, `F` bins by `T` frames.
///
/// Storage is frequency-major: bin `f` of frame `t` lives at `f * T + t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSpectrum {
    bins: usize,
    frames: usize,
    data: Vec<Complex64>,
}

impl ComplexSpectrum {
    pub fn zeros(bins: usize, frames: usize) -> Self {
        ComplexSpectrum {
            bins,
            frames,
            data: vec![Complex64::new(0.0, 0.0); bins * frames],
        }
    }

    /// Builds a spectrum from per-frame bin vectors, which must all have the same length.
    pub fn from_frames(frames: &[Vec<Complex64>]) -> Result<Self> {
        let bins = frames.first().map_or(0, Vec::len);
        let mut spec = ComplexSpectrum::zeros(bins, frames.len());
        for (t, frame) in frames.iter().enumerate() {
            if frame.len() != bins {
                return Err(Error::LengthMismatch {
                    what: "spectrum frame",
                    expected: bins,
                    got: frame.len(),
                });
            }
            spec.set_frame(t, frame);
        }
        Ok(spec)
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn get(&self, bin: usize, frame: usize) -> Complex64 {
        self.data[bin * self.frames + frame]
    }

    pub fn set(&mut self, bin: usize, frame: usize, value: Complex64) {
        self.data[bin * self.frames + frame] = value;
    }

    pub fn frame(&self, t: usize) -> Vec<Complex64> {
        (0..self.bins).map(|f| self.get(f, t)).collect()
    }

    pub fn set_frame(&mut self, t: usize, frame: &[Complex64]) {
        for (f, v) in frame.iter().enumerate() {
            self.set(f, t, *v);
        }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}
