//! Streaming speech enhancement with a complex convolutional recurrent
//! network (DCCRN) using causal layers, a direct signal-estimation head and
//! overlapped-frame prediction.
//!
//! The crate is organised bottom-up:
//!
//! - [`framing`]: STFT, synthesis windows and overlap-add for single-frame
//!   and overlapped-frame prediction;
//! - [`complex_nn`]: complex convolution, transposed convolution, LSTM,
//!   batch norm, PReLU and linear layers;
//! - [`model`]: configurations of every network variant, weight loading and the
//!   batch and streaming forward passes;
//! - [`streaming`]: the push/flush engine and latency accounting;
//! - [`metrics`]: SI-SNR, the SI-SNR + magnitude loss and SI-SDR reports;
//! - [`io`]: WAV files, the DCW1 weight container and golden vector sets.
//!
//! ```
//! use dccrn::model::{random_weights, InitOptions, Model, ModelConfig, Variant};
//! use dccrn::streaming::StreamEngine;
//!
//! let cfg = ModelConfig::adopted(Variant::PROPOSED);
//! let model = Model::from_weights(&cfg, &random_weights(&cfg, InitOptions::seeded(1)))?;
//! let mut stream = StreamEngine::real_time(&model)?;
//! assert!(stream.push(&[0.0; 511])?.is_empty());
//! assert_eq!(stream.push(&[0.0])?.len(), 128);
//! # Ok::<(), dccrn::Error>(())
//! ```

pub mod complex_nn;
pub mod error;
pub mod framing;
pub mod io;
pub mod metrics;
pub mod model;
pub mod streaming;

pub use error::{Error, Result};
pub use framing::{FrameConfig, Summation};
pub use model::{FrameEstimator, IdentityEstimator, Model, ModelConfig, Variant};
pub use streaming::{StreamEngine, StreamMode};
