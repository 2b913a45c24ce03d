//! Sample-in, sample-out processing with exact latency accounting.

use std::ops::Range;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{padded_length, FrameEstimator, FramePipeline, ModelConfig, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamMode {
    /// Only causal estimators; latency equals the frame length.
    RealTime,
    /// Any estimator; look-ahead frames are buffered before emission.
    OfflineSimulation,
}

/// Throughput counters of one stream.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct StreamStats {
    pub samples_in: usize,
    pub samples_out: usize,
    pub frames: usize,
    pub busy: Duration,
    pub sample_rate: u32,
}

impl StreamStats {
    /// Audio seconds processed per wall-clock second.
    pub fn real_time_factor(&self) -> f64 {
        let secs = self.busy.as_secs_f64();
        if secs == 0.0 {
            return f64::INFINITY;
        }
        self.samples_in as f64 / secs / self.sample_rate as f64
    }
}

/// Online enhancer. Every completed hop runs one network step and, once the
/// pipeline is full, emits one sub-frame of `P` samples.
pub struct StreamEngine<E: FrameEstimator> {
    pipe: FramePipeline<E>,
    mode: StreamMode,
    frame_len: usize,
    hop: usize,
    lookahead: usize,
    overlap: usize,
    buf: Vec<f64>,
    stats: StreamStats,
    tail: Option<Range<usize>>,
    closed: bool,
}

impl<E: FrameEstimator> StreamEngine<E> {
    pub fn new(est: E, mode: StreamMode) -> Result<Self> {
        if mode == StreamMode::RealTime && !est.is_causal() {
            return Err(Error::RealTimeRequiresCausal);
        }
        let cfg = est.frame_config().clone();
        let lookahead = est.lookahead_frames();
        Ok(StreamEngine {
            pipe: FramePipeline::new(est)?,
            mode,
            frame_len: cfg.frame_len,
            hop: cfg.hop,
            lookahead,
            overlap: cfg.overlap(),
            buf: Vec::with_capacity(cfg.frame_len + cfg.hop),
            stats: StreamStats {
                sample_rate: cfg.sample_rate,
                ..StreamStats::default()
            },
            tail: None,
            closed: false,
        })
    }

    pub fn real_time(est: E) -> Result<Self> {
        Self::new(est, StreamMode::RealTime)
    }

    pub fn offline_simulation(est: E) -> Result<Self> {
        Self::new(est, StreamMode::OfflineSimulation)
    }

    pub fn mode(&self) -> StreamMode {
        self.mode
    }

    /// Input samples consumed before the first output sample appears.
    pub fn latency_samples(&self) -> usize {
        self.frame_len + self.lookahead * self.hop
    }

    /// Leading output samples built from fewer than `K` frames.
    pub fn warm_up(&self) -> Range<usize> {
        0..(self.overlap - 1) * self.hop
    }

    /// Output samples emitted by [`StreamEngine::flush`], which depend on
    /// zero padding past the end of the input.
    pub fn tail(&self) -> Option<Range<usize>> {
        self.tail.clone()
    }

    pub fn stats(&self) -> StreamStats {
        self.stats
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    fn consume(&mut self, samples: impl IntoIterator<Item = f64>, limit: usize) -> Result<Vec<f32>> {
        let start = Instant::now();
        let mut out = Vec::new();
        for v in samples {
            self.buf.push(v);
            if self.buf.len() < self.frame_len {
                continue;
            }
            self.stats.frames += 1;
            if let Some(sub) = self.pipe.process_frame(&self.buf)? {
                out.extend(sub.iter().map(|&v| v as f32));
            }
            self.buf.drain(..self.hop);
        }
        out.truncate(limit.saturating_sub(self.stats.samples_out));
        self.stats.samples_out += out.len();
        self.stats.busy += start.elapsed();
        Ok(out)
    }

    /// Feeds samples and returns every sub-frame completed by them.
    pub fn push(&mut self, samples: &[f32]) -> Result<Vec<f32>> {
        if self.closed {
            return Err(Error::StreamClosed);
        }
        self.stats.samples_in += samples.len();
        self.consume(samples.iter().map(|&v| v as f64), usize::MAX)
    }

    /// Byte interface: little-endian `f32` samples in and out.
    pub fn push_le_bytes(&mut self, bytes: &[u8]) -> Result<Vec<u8>> {
        if bytes.len() % 4 != 0 {
            return Err(Error::LengthMismatch {
                what: "sample bytes (multiple of 4)",
                expected: bytes.len() / 4 * 4,
                got: bytes.len(),
            });
        }
        let samples: Vec<f32> = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(self.push(&samples)?.iter().flat_map(|v| v.to_le_bytes()).collect())
    }

    /// Zero-pads until every sub-frame covering the input is out, returns the
    /// remaining samples (trimmed to the input length) and closes the stream.
    pub fn flush(&mut self) -> Result<Vec<f32>> {
        if self.closed {
            return Err(Error::AlreadyFlushed);
        }
        self.closed = true;
        let n = self.stats.samples_in;
        if n == 0 {
            self.tail = Some(0..0);
            return Ok(Vec::new());
        }
        let total = padded_length(n, self.frame_len, self.hop, self.lookahead);
        let before = self.stats.samples_out;
        let out = self.consume(std::iter::repeat_n(0.0, total - n), n)?;
        self.tail = Some(before..before + out.len());
        Ok(out)
    }
}

/// Framing-level latency of one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LatencyReport {
    pub causal: bool,
    pub lookahead_subframes: usize,
    pub algorithmic_latency_samples: usize,
    pub algorithmic_latency_ms: f64,
}

/// Latency from the frame length plus the configured network look-ahead.
pub fn latency_probe(cfg: &ModelConfig) -> LatencyReport {
    let sub = cfg.frame.overlap() + cfg.lookahead_frames;
    LatencyReport {
        causal: cfg.causal,
        lookahead_subframes: sub,
        algorithmic_latency_samples: sub * cfg.frame.hop,
        algorithmic_latency_ms: sub as f64 * cfg.frame.hop_ms(),
    }
}

/// Causal and non-causal latency of an architecture side by side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LatencyComparison {
    pub causal: LatencyReport,
    pub non_causal: LatencyReport,
    /// `non_causal / causal - 1`.
    pub relative_increase: f64,
}

pub fn latency_comparison(cfg: &ModelConfig) -> Result<LatencyComparison> {
    let v = cfg.variant();
    let causal = latency_probe(&cfg.with_variant(Variant { causal: true, ..v })?);
    let non_causal = latency_probe(&cfg.with_variant(Variant { causal: false, ..v })?);
    Ok(LatencyComparison {
        causal,
        non_causal,
        relative_increase: non_causal.algorithmic_latency_ms / causal.algorithmic_latency_ms - 1.0,
    })
}
