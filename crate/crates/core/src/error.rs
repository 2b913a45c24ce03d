use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invalid frame configuration: {0}")]
    InvalidFrameConfig(String),

    #[error("window violates reconstruction condition at n = {index}")]
    WindowCondition { index: usize },

    #[error("synthesis window mode mismatch: expected {expected}, got {got}")]
    ModeMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("prediction stack depth {got} does not match K = {expected}")]
    StackDepth { expected: usize, got: usize },

    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("shape mismatch at `{path}`: expected {expected:?}, got {got:?}")]
    Shape {
        path: String,
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("missing tensor `{0}`")]
    MissingTensor(String),

    #[error("missing batch-norm statistics `{0}`")]
    MissingStatistics(String),

    #[error("orphan tensors not referenced by the model: {0:?}")]
    OrphanTensors(Vec<String>),

    #[error("invalid model configuration: {0}")]
    InvalidModelConfig(String),

    #[error("recurrent state is not initialized; call reset first")]
    UninitializedState,

    #[error("numeric overflow at layer {0}")]
    NumericOverflow(String),

    #[error("reference signal is identically zero")]
    ZeroReference,

    #[error("stream is closed")]
    StreamClosed,

    #[error("stream already flushed")]
    AlreadyFlushed,

    #[error("real-time streaming requires a causal model configuration")]
    RealTimeRequiresCausal,

    #[error("unsupported sample rate {0} Hz (expected 16000; resampling is not supported)")]
    UnsupportedSampleRate(u32),

    #[error("unsupported channel count {0} (mono only)")]
    NotMono(u16),

    #[error("unsupported wav sample format: {0}")]
    UnsupportedWavFormat(String),

    #[error("malformed wav file: {0}")]
    MalformedWav(String),

    #[error("checksum mismatch in tensor `{tensor}`")]
    Checksum { tensor: String },

    #[error("unknown format version {0}")]
    FormatVersion(u32),

    #[error("shape conflict in tensor `{tensor}`: {detail}")]
    ShapeConflict { tensor: String, detail: String },

    #[error("malformed container: {0}")]
    Format(String),

    #[error("config hash mismatch: file has {found}, model has {expected}")]
    ConfigHash { expected: String, found: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line tool: 2 usage, 3 I/O,
    /// 4 format, 5 numeric.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Io { .. } => 3,
            NumericOverflow(_) | ZeroReference | WindowCondition { .. } => 5,
            InvalidFrameConfig(_)
            | Shape { .. }
            | MissingTensor(_)
            | MissingStatistics(_)
            | OrphanTensors(_)
            | InvalidModelConfig(_)
            | UnsupportedSampleRate(_)
            | NotMono(_)
            | UnsupportedWavFormat(_)
            | MalformedWav(_)
            | Checksum { .. }
            | FormatVersion(_)
            | ShapeConflict { .. }
            | Format(_)
            | ConfigHash { .. }
            | Json(_)
            | InsufficientSamples { .. }
            | LengthMismatch { .. } => 4,
            ModeMismatch { .. }
            | StackDepth { .. }
            | UninitializedState
            | StreamClosed
            | AlreadyFlushed
            | RealTimeRequiresCausal => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn shape(path: impl Into<String>, expected: &[usize], got: &[usize]) -> Self {
        Error::Shape {
            path: path.into(),
            expected: expected.to_vec(),
            got: got.to_vec(),
        }
    }
}
