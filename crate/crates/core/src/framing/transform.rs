use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{ComplexSpectrum, FrameConfig};
use crate::error::{Error, Result};

/// Planned forward/inverse transforms for one frame geometry.
#[derive(Clone)]
pub struct FrameTransform {
    frame_len: usize,
    window: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FrameTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrameTransform")
            .field("frame_len", &self.frame_len)
            .finish_non_exhaustive()
    }
}

impl FrameTransform {
    pub fn new(cfg: &FrameConfig) -> Result<Self> {
        cfg.validate()?;
        let mut planner = FftPlanner::new();
        Ok(FrameTransform {
            frame_len: cfg.frame_len,
            window: cfg.analysis_window(),
            forward: planner.plan_fft_forward(cfg.frame_len),
            inverse: planner.plan_fft_inverse(cfg.frame_len),
        })
    }

    pub fn bins(&self) -> usize {
        self.frame_len / 2 + 1
    }

    /// Windows `frame` by the analysis window and returns its one-sided spectrum.
    pub fn analyze(&self, frame: &[f64]) -> Result<Vec<Complex64>> {
        if frame.len() != self.frame_len {
            return Err(Error::LengthMismatch {
                what: "analysis frame",
                expected: self.frame_len,
                got: frame.len(),
            });
        }
        let mut buf: Vec<Complex64> = frame
            .iter()
            .zip(&self.window)
            .map(|(x, g)| Complex64::new(x * g, 0.0))
            .collect();
        self.forward.process(&mut buf);
        buf.truncate(self.bins());
        Ok(buf)
    }

    /// Real inverse transform of a one-sided spectrum; no window is applied.
    ///
    /// The imaginary parts of the DC and Nyquist bins are discarded so the
    /// result is the inverse of a conjugate-symmetric spectrum.
    pub fn synthesize(&self, spectrum: &[Complex64]) -> Result<Vec<f64>> {
        let bins = self.bins();
        if spectrum.len() != bins {
            return Err(Error::LengthMismatch {
                what: "spectrum frame",
                expected: bins,
                got: spectrum.len(),
            });
        }
        let n = self.frame_len;
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        buf[0] = Complex64::new(spectrum[0].re, 0.0);
        buf[n / 2] = Complex64::new(spectrum[n / 2].re, 0.0);
        for f in 1..n / 2 {
            buf[f] = spectrum[f];
            buf[n - f] = spectrum[f].conj();
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / n as f64;
        Ok(buf.iter().map(|c| c.re * scale).collect())
    }
}

/// Frames `signal` without padding: frame `t` covers `[tP, tP + W)`.
pub fn stft(signal: &[f64], cfg: &FrameConfig) -> Result<ComplexSpectrum> {
    if signal.len() < cfg.frame_len {
        return Err(Error::InsufficientSamples {
            needed: cfg.frame_len,
            got: signal.len(),
        });
    }
    let tx = FrameTransform::new(cfg)?;
    let frames = (signal.len() - cfg.frame_len) / cfg.hop + 1;
    let mut spec = ComplexSpectrum::zeros(tx.bins(), frames);
    for t in 0..frames {
        let start = t * cfg.hop;
        let bins = tx.analyze(&signal[start..start + cfg.frame_len])?;
        spec.set_frame(t, &bins);
    }
    Ok(spec)
}

pub fn istft_frame(spectrum_frame: &[Complex64], cfg: &FrameConfig) -> Result<Vec<f64>> {
    FrameTransform::new(cfg)?.synthesize(spectrum_frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn impulse_spectrum_alternates_sign() {
        let cfg = FrameConfig::default();
        let mut x = vec![0.0; 512];
        x[256] = 1.0;
        let spec = stft(&x, &cfg).unwrap();
        assert_eq!(spec.frames(), 1);
        for f in 0..257 {
            let expected = if f % 2 == 0 { 1.0 } else { -1.0 };
            let v = spec.get(f, 0);
            assert!((v.re - expected).abs() < 1e-12 && v.im.abs() < 1e-12, "bin {f}: {v}");
        }
    }

    #[test]
    fn alternating_spectrum_inverts_to_impulse() {
        let cfg = FrameConfig::default();
        let spec: Vec<_> = (0..257)
            .map(|f| Complex64::new(if f % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        let frame = istft_frame(&spec, &cfg).unwrap();
        for (n, v) in frame.iter().enumerate() {
            let expected = if n == 256 { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-12, "n={n}: {v}");
        }
    }

    #[test]
    fn zero_signal_gives_zero_spectrum() {
        let spec = stft(&[0.0; 1024], &FrameConfig::default()).unwrap();
        assert_eq!((spec.bins(), spec.frames()), (257, 5));
        assert!(spec.as_slice().iter().all(|c| c.norm() == 0.0));
        let frame = istft_frame(&spec.frame(0), &FrameConfig::default()).unwrap();
        assert!(frame.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn short_signal_is_rejected() {
        assert!(matches!(
            stft(&[0.0; 511], &FrameConfig::default()),
            Err(Error::InsufficientSamples { needed: 512, got: 511 })
        ));
    }

    #[test]
    fn wrong_spectrum_length_is_rejected() {
        let r = istft_frame(&[Complex64::new(0.0, 0.0); 256], &FrameConfig::default());
        assert!(matches!(r, Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn forward_of_inverse_is_identity() {
        let cfg = FrameConfig::default().rectangular();
        let tx = FrameTransform::new(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut spec: Vec<Complex64> = (0..257)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        spec[0].im = 0.0;
        spec[256].im = 0.0;
        let frame = tx.synthesize(&spec).unwrap();
        let back = tx.analyze(&frame).unwrap();
        for (a, b) in spec.iter().zip(&back) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn frame_count_floors() {
        let cfg = FrameConfig::default();
        assert_eq!(stft(&vec![0.0; 512 + 3 * 128 + 127], &cfg).unwrap().frames(), 4);
    }
}
