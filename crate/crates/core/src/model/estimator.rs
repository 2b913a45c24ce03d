use std::collections::VecDeque;

use num_complex::Complex32;

use super::config::ModelConfig;
use super::network::{FrameStack, Model, ModelState};
use crate::error::{Error, Result};
use crate::framing::{FrameConfig, SynthesisMode};

/// Anything that maps one noisy spectrum frame per step to a stack of
/// predicted clean frames.
pub trait FrameEstimator {
    type State;

    fn frame_config(&self) -> &FrameConfig;

    /// Stack depth: 1, or `K` for overlapped prediction.
    fn frames_per_step(&self) -> usize;

    /// Steps between receiving frame `t` and predicting it.
    fn lookahead_frames(&self) -> usize;

    fn synthesis_mode(&self) -> SynthesisMode;

    fn is_causal(&self) -> bool {
        self.lookahead_frames() == 0
    }

    fn init_state(&self) -> Self::State;

    /// Entry `k` of the stack predicts frame `t - lookahead - k`.
    fn estimate(&self, frame: &[Complex32], state: &mut Self::State) -> Result<Option<FrameStack>>;
}

impl<E: FrameEstimator + ?Sized> FrameEstimator for &E {
    type State = E::State;

    fn frame_config(&self) -> &FrameConfig {
        (**self).frame_config()
    }
    fn frames_per_step(&self) -> usize {
        (**self).frames_per_step()
    }
    fn lookahead_frames(&self) -> usize {
        (**self).lookahead_frames()
    }
    fn synthesis_mode(&self) -> SynthesisMode {
        (**self).synthesis_mode()
    }
    fn is_causal(&self) -> bool {
        (**self).is_causal()
    }
    fn init_state(&self) -> Self::State {
        (**self).init_state()
    }
    fn estimate(&self, frame: &[Complex32], state: &mut Self::State) -> Result<Option<FrameStack>> {
        (**self).estimate(frame, state)
    }
}

impl FrameEstimator for Model {
    type State = ModelState;

    fn frame_config(&self) -> &FrameConfig {
        &self.config().frame
    }
    fn frames_per_step(&self) -> usize {
        self.config().frames_per_step()
    }
    fn lookahead_frames(&self) -> usize {
        self.delay()
    }
    fn synthesis_mode(&self) -> SynthesisMode {
        self.config().synthesis_mode()
    }
    fn is_causal(&self) -> bool {
        self.config().causal
    }
    fn init_state(&self) -> ModelState {
        Model::init_state(self)
    }
    fn estimate(&self, frame: &[Complex32], state: &mut ModelState) -> Result<Option<FrameStack>> {
        self.forward_step(frame, state)
    }
}

/// Returns the buffered input frames unchanged: entry `k` is the noisy
/// frame `t - lookahead - k`, zero before the start.
#[derive(Clone, Debug)]
pub struct IdentityEstimator {
    frame: FrameConfig,
    mode: SynthesisMode,
    lookahead: usize,
}

impl IdentityEstimator {
    pub fn new(frame: FrameConfig, mode: SynthesisMode) -> Result<Self> {
        frame.validate()?;
        Ok(IdentityEstimator {
            frame,
            mode,
            lookahead: 0,
        })
    }

    /// Matches the stack depth, synthesis and delay of a model configuration.
    pub fn like(cfg: &ModelConfig) -> Self {
        IdentityEstimator {
            frame: cfg.frame.clone(),
            mode: cfg.synthesis_mode(),
            lookahead: cfg.lookahead_frames,
        }
    }

    pub fn with_lookahead(mut self, frames: usize) -> Self {
        self.lookahead = frames;
        self
    }
}

impl FrameEstimator for IdentityEstimator {
    type State = VecDeque<Vec<Complex32>>;

    fn frame_config(&self) -> &FrameConfig {
        &self.frame
    }

    fn frames_per_step(&self) -> usize {
        match self.mode {
            SynthesisMode::SingleFrame => 1,
            _ => self.frame.overlap(),
        }
    }

    fn lookahead_frames(&self) -> usize {
        self.lookahead
    }

    fn synthesis_mode(&self) -> SynthesisMode {
        self.mode
    }

    fn init_state(&self) -> Self::State {
        VecDeque::new()
    }

    fn estimate(&self, frame: &[Complex32], state: &mut Self::State) -> Result<Option<FrameStack>> {
        let bins = self.frame.bins();
        if frame.len() != bins {
            return Err(Error::LengthMismatch {
                what: "input spectrum frame",
                expected: bins,
                got: frame.len(),
            });
        }
        let k = self.frames_per_step();
        state.push_front(frame.to_vec());
        state.truncate(k + self.lookahead);
        if state.len() <= self.lookahead {
            return Ok(None);
        }
        let zero = vec![Complex32::new(0.0, 0.0); bins];
        Ok(Some(
            (0..k)
                .map(|j| state.get(self.lookahead + j).cloned().unwrap_or_else(|| zero.clone()))
                .collect(),
        ))
    }
}
