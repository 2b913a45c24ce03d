use num_complex::{Complex32, Complex64};

use super::estimator::FrameEstimator;
use crate::error::{Error, Result};
use crate::framing::{make_synthesis_window, stft, FrameTransform, OverlapAdder};

/// Analysis, estimation and synthesis for one frame per call.
///
/// Shared by the offline and streaming front ends so both produce identical
/// samples.
pub struct FramePipeline<E: FrameEstimator> {
    est: E,
    state: E::State,
    transform: FrameTransform,
    adder: OverlapAdder,
    frames_in: usize,
    subframes_out: usize,
}

impl<E: FrameEstimator> FramePipeline<E> {
    pub fn new(est: E) -> Result<Self> {
        let cfg = est.frame_config().clone();
        let window = make_synthesis_window(&cfg, est.synthesis_mode())?;
        let adder = OverlapAdder::new(&cfg, &window, est.frames_per_step())?;
        Ok(FramePipeline {
            state: est.init_state(),
            transform: FrameTransform::new(&cfg)?,
            adder,
            est,
            frames_in: 0,
            subframes_out: 0,
        })
    }

    pub fn estimator(&self) -> &E {
        &self.est
    }

    pub fn frames_in(&self) -> usize {
        self.frames_in
    }

    pub fn subframes_out(&self) -> usize {
        self.subframes_out
    }

    /// Consumes one time-domain frame of `W` samples.
    pub fn process_frame(&mut self, samples: &[f64]) -> Result<Option<Vec<f64>>> {
        let spec = self.transform.analyze(samples)?;
        self.process_spectrum(&spec)
    }

    /// Consumes one analysis spectrum; returns the next output sub-frame of
    /// `P` samples once the estimator starts producing.
    pub fn process_spectrum(&mut self, spec: &[Complex64]) -> Result<Option<Vec<f64>>> {
        let x: Vec<Complex32> = spec
            .iter()
            .map(|c| Complex32::new(c.re as f32, c.im as f32))
            .collect();
        self.frames_in += 1;
        let Some(stack) = self.est.estimate(&x, &mut self.state)? else {
            return Ok(None);
        };
        let frames = stack
            .iter()
            .map(|f| {
                let s: Vec<Complex64> = f.iter().map(|c| Complex64::new(c.re as f64, c.im as f64)).collect();
                self.transform.synthesize(&s)
            })
            .collect::<Result<Vec<_>>>()?;
        let out = self.adder.push(&frames)?;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericOverflow("overlap-add".into()));
        }
        self.subframes_out += 1;
        Ok(Some(out))
    }
}

/// Input length, zero-padded, so that every sub-frame covering the first
/// `len` samples is emitted.
pub fn padded_length(len: usize, frame_len: usize, hop: usize, lookahead: usize) -> usize {
    let sub = len.div_ceil(hop);
    (sub + lookahead).saturating_sub(1) * hop + frame_len
}

/// Enhances a whole signal with the same padding and arithmetic as the
/// streaming engine; the result has the input length.
pub fn enhance_offline<E: FrameEstimator>(est: E, noisy: &[f32]) -> Result<Vec<f32>> {
    let cfg = est.frame_config().clone();
    if noisy.len() < cfg.frame_len {
        return Err(Error::InsufficientSamples {
            needed: cfg.frame_len,
            got: noisy.len(),
        });
    }
    let total = padded_length(noisy.len(), cfg.frame_len, cfg.hop, est.lookahead_frames());
    let mut x: Vec<f64> = noisy.iter().map(|&v| v as f64).collect();
    x.resize(total, 0.0);
    let spec = stft(&x, &cfg)?;
    let mut pipe = FramePipeline::new(est)?;
    let mut out = Vec::with_capacity(total);
    for t in 0..spec.frames() {
        if let Some(sub) = pipe.process_spectrum(&spec.frame(t))? {
            out.extend(sub.iter().map(|&v| v as f32));
        }
    }
    out.truncate(noisy.len());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framing::{FrameConfig, SynthesisMode};
    use crate::model::estimator::IdentityEstimator;

    fn chirp(n: usize) -> Vec<f32> {
        (0..n)
            .map(|i| {
                let t = i as f32 / 16000.0;
                0.5 * (2.0 * std::f32::consts::PI * (200.0 + 900.0 * t) * t).sin()
            })
            .collect()
    }

    #[test]
    fn padding_covers_every_subframe() {
        assert_eq!(padded_length(512, 512, 128, 0), 896);
        assert_eq!(padded_length(513, 512, 128, 0), 1024);
        assert_eq!(padded_length(512, 512, 128, 2), 1152);
    }

    #[test]
    fn identity_reconstructs_after_warm_up() {
        let x = chirp(4000);
        for mode in [SynthesisMode::SingleFrame, SynthesisMode::PartialSum, SynthesisMode::FullSum] {
            let est = IdentityEstimator::new(FrameConfig::default(), mode).unwrap();
            let y = enhance_offline(&est, &x).unwrap();
            assert_eq!(y.len(), x.len());
            // The first W - P samples see fewer than K frames.
            for i in 384..x.len() {
                assert!((y[i] - x[i]).abs() < 1e-5, "{mode:?} sample {i}: {} vs {}", y[i], x[i]);
            }
        }
    }

    #[test]
    fn short_input_is_rejected() {
        let est = IdentityEstimator::new(FrameConfig::default(), SynthesisMode::SingleFrame).unwrap();
        assert!(matches!(
            enhance_offline(&est, &[0.0; 100]),
            Err(Error::InsufficientSamples { needed: 512, got: 100 })
        ));
    }
}
