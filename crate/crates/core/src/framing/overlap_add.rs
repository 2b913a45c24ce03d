use super::{FrameConfig, Summation, SynthesisMode, SynthesisWindow};
use crate::error::{Error, Result};

/// Incremental overlap-add with one sub-frame emitted per step.
///
/// At step `t` the caller supplies a stack of time-domain frames, where entry
/// `k` is a prediction of frame `t - k`. The accumulator covers
/// `[tP, tP + W)` and is kept in double precision.
#[derive(Clone, Debug)]
pub struct OverlapAdder {
    mode: SynthesisMode,
    hop: usize,
    depth: usize,
    window: Vec<f64>,
    acc: Vec<f64>,
    last_stack: Option<Vec<Vec<f64>>>,
}

impl OverlapAdder {
    /// `depth` is the stack size expected per step: 1 for single-frame,
    /// `K` for overlapped modes.
    pub fn new(cfg: &FrameConfig, window: &SynthesisWindow, depth: usize) -> Result<Self> {
        cfg.validate()?;
        if window.taps.len() != cfg.frame_len {
            return Err(Error::LengthMismatch {
                what: "synthesis window",
                expected: cfg.frame_len,
                got: window.taps.len(),
            });
        }
        if depth == 0 || depth > cfg.overlap() {
            return Err(Error::StackDepth {
                expected: cfg.overlap(),
                got: depth,
            });
        }
        if window.mode == SynthesisMode::SingleFrame && depth != 1 {
            return Err(Error::StackDepth {
                expected: 1,
                got: depth,
            });
        }
        Ok(OverlapAdder {
            mode: window.mode,
            hop: cfg.hop,
            depth,
            window: window.taps.clone(),
            acc: vec![0.0; cfg.frame_len],
            last_stack: None,
        })
    }

    pub fn mode(&self) -> SynthesisMode {
        self.mode
    }

    pub fn frame_len(&self) -> usize {
        self.window.len()
    }

    /// Adds one step of predictions and returns the completed sub-frame.
    pub fn push(&mut self, stack: &[Vec<f64>]) -> Result<Vec<f64>> {
        if stack.len() != self.depth {
            return Err(Error::StackDepth {
                expected: self.depth,
                got: stack.len(),
            });
        }
        let w = self.window.len();
        let p = self.hop;
        for frame in stack {
            if frame.len() != w {
                return Err(Error::LengthMismatch {
                    what: "prediction frame",
                    expected: w,
                    got: frame.len(),
                });
            }
        }
        // Oldest frame first, so the per-sample summation order matches
        // plain overlap-add of consecutive frames.
        for k in (0..self.depth).rev() {
            let frame = &stack[k];
            let end = match self.mode {
                SynthesisMode::SingleFrame | SynthesisMode::FullSum => w,
                SynthesisMode::PartialSum => (k + 1) * p,
            };
            for i in k * p..end {
                self.acc[i - k * p] += self.window[i] * frame[i];
            }
        }
        let out = self.acc[..p].to_vec();
        self.acc.copy_within(p.., 0);
        self.acc[w - p..].fill(0.0);
        if self.mode == SynthesisMode::PartialSum {
            self.last_stack = Some(stack.to_vec());
        }
        Ok(out)
    }

    /// Drains the `W - P` samples still pending after the last step.
    ///
    /// Partial summation completes the tail from the segments of the last
    /// stack that were never emitted.
    pub fn finish(mut self) -> Vec<f64> {
        let w = self.window.len();
        let p = self.hop;
        if let Some(stack) = self.last_stack.take() {
            for k in (0..self.depth).rev() {
                for i in (k + 1) * p..w {
                    self.acc[i - (k + 1) * p] += self.window[i] * stack[k][i];
                }
            }
        }
        self.acc.truncate(w - p);
        self.acc
    }
}

/// Standard overlap-add of single-frame predictions; output length `(T - 1)P + W`.
pub fn overlap_add_single(
    frames: &[Vec<f64>],
    window: &SynthesisWindow,
    cfg: &FrameConfig,
) -> Result<Vec<f64>> {
    if window.mode != SynthesisMode::SingleFrame {
        return Err(Error::ModeMismatch {
            expected: SynthesisMode::SingleFrame.as_str(),
            got: window.mode.as_str(),
        });
    }
    let mut adder = OverlapAdder::new(cfg, window, 1)?;
    let mut out = Vec::with_capacity(frames.len() * cfg.hop + cfg.frame_len);
    for frame in frames {
        out.extend(adder.push(std::slice::from_ref(frame))?);
    }
    out.extend(adder.finish());
    Ok(out)
}

/// Overlap-add of per-step prediction stacks (entry `k` predicts frame `t - k`).
pub fn overlap_add_overlapped(
    predictions: &[Vec<Vec<f64>>],
    window: &SynthesisWindow,
    cfg: &FrameConfig,
    summation: Summation,
) -> Result<Vec<f64>> {
    let ok = matches!(
        (summation, window.mode),
        (Summation::Partial, SynthesisMode::PartialSum)
            | (Summation::Partial, SynthesisMode::SingleFrame)
            | (Summation::Full, SynthesisMode::FullSum)
    );
    if !ok {
        let expected = match summation {
            Summation::Partial => SynthesisMode::PartialSum,
            Summation::Full => SynthesisMode::FullSum,
        };
        return Err(Error::ModeMismatch {
            expected: expected.as_str(),
            got: window.mode.as_str(),
        });
    }
    let k = cfg.overlap();
    // a K = 1 geometry has nothing to sum over: plain overlap-add
    let window = if window.mode == SynthesisMode::SingleFrame || k == 1 {
        SynthesisWindow {
            mode: if k == 1 {
                SynthesisMode::SingleFrame
            } else {
                SynthesisMode::PartialSum
            },
            taps: window.taps.clone(),
        }
    } else {
        window.clone()
    };
    let mut adder = OverlapAdder::new(cfg, &window, k)?;
    let mut out = Vec::with_capacity(predictions.len() * cfg.hop + cfg.frame_len);
    for stack in predictions {
        out.extend(adder.push(stack)?);
    }
    out.extend(adder.finish());
    Ok(out)
}
