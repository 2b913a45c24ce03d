//! WAV audio, the DCW1 weight container and DCG1 golden vector sets.

mod container;
pub mod golden;
pub mod wav;
pub mod weight_file;

pub use container::{TensorRecord, FORMAT_VERSION};
pub use golden::{verify_golden, GoldenVectorSet, LayerParity, ParityReport};
pub use wav::{read_wav, write_wav, AudioBuffer, SampleFormat, ENGINE_SAMPLE_RATE};
pub use weight_file::{load_weights, save_weights, weights_from_bytes, weights_to_bytes};
