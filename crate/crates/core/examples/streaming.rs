//! Feed a causal network in irregular chunks and compare with offline
//! processing of the whole signal.

use dccrn::model::{enhance_offline, random_weights, InitOptions};
use dccrn::{Model, ModelConfig, StreamEngine, Variant};

fn main() -> dccrn::Result<()> {
    let cfg = ModelConfig::adopted(Variant::PROPOSED);
    let model = Model::from_weights(&cfg, &random_weights(&cfg, InitOptions::seeded(4)))?;
    let x: Vec<f32> = (0..8000).map(|n| 0.2 * (n as f32 * 0.013).sin()).collect();

    let mut stream = StreamEngine::real_time(&model)?;
    let mut y = Vec::new();
    for (i, chunk) in x.chunks(173).enumerate() {
        let out = stream.push(chunk)?;
        if i < 6 {
            println!("chunk {i}: {} in, {} out", chunk.len(), out.len());
        }
        y.extend(out);
    }
    y.extend(stream.flush()?);
    let st = stream.stats();
    println!("frames {}, real-time factor {:.3}", st.frames, st.real_time_factor());
    println!("warm-up {:?}, tail {:?}", stream.warm_up(), stream.tail());
    println!("matches offline: {}", y == enhance_offline(&model, &x)?);
    Ok(())
}
