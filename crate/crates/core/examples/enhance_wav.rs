//! Enhance a WAV file offline.
//!
//! ```text
//! cargo run --example enhance_wav -- weights.dcw noisy.wav enhanced.wav
//! ```
//! Without arguments a randomly initialised network processes a synthetic
//! signal in a temporary directory.

use dccrn::io::{load_weights, read_wav, save_weights, write_wav, AudioBuffer, SampleFormat};
use dccrn::model::{enhance_offline, random_weights, InitOptions};
use dccrn::{Model, ModelConfig, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dir = std::env::temp_dir().join("dccrn-enhance-example");
    let (weights, input, output) = match args.as_slice() {
        [w, i, o] => (w.into(), i.into(), o.into()),
        _ => {
            std::fs::create_dir_all(&dir)?;
            let cfg = ModelConfig::adopted(Variant::PROPOSED);
            save_weights(dir.join("w.dcw"), &cfg, &random_weights(&cfg, InitOptions::seeded(1)))?;
            let x: Vec<f32> = (0..16_000).map(|n| 0.3 * (n as f32 * 0.05).sin()).collect();
            write_wav(dir.join("in.wav"), &AudioBuffer::new(x, 16_000, SampleFormat::Pcm16))?;
            (dir.join("w.dcw"), dir.join("in.wav"), dir.join("out.wav"))
        }
    };
    let (cfg, store) = load_weights(&weights)?;
    let model = Model::from_weights(&cfg, &store)?;
    let noisy = read_wav(&input)?;
    let y = enhance_offline(&model, &noisy.samples)?;
    write_wav(&output, &AudioBuffer::new(y, 16_000, noisy.format))?;
    println!("{} -> {}", input.display(), output.display());
    Ok(())
}
