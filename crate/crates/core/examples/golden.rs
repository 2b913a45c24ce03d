//! Record per-layer golden vectors from one model and check another model
//! against them. With a directory argument the reference weights and vectors
//! are also written there as `probe.dcw` and `probe.dcg`.

use dccrn::io::{save_weights, verify_golden, GoldenVectorSet};
use dccrn::model::{random_weights, InitOptions};
use dccrn::{Model, ModelConfig, Variant};
use num_complex::Complex32;

fn main() -> dccrn::Result<()> {
    let cfg = ModelConfig::adopted(Variant::PROPOSED);
    let store = random_weights(&cfg, InitOptions::seeded(1));
    let reference = Model::from_weights(&cfg, &store)?;
    let frames: Vec<Vec<Complex32>> = (0..4)
        .map(|t| (0..257).map(|k| Complex32::new(((k + t) as f32 * 0.1).sin(), 0.05)).collect())
        .collect();
    let set = GoldenVectorSet::from_bytes(&GoldenVectorSet::record(&reference, &frames)?.to_bytes())?;

    if let Some(dir) = std::env::args().nth(1) {
        let dir = std::path::Path::new(&dir);
        save_weights(dir.join("probe.dcw"), &cfg, &store)?;
        set.save(dir.join("probe.dcg"))?;
        println!("wrote {}", dir.display());
    }

    let same = verify_golden(&reference, &set)?;
    println!("same weights:  passed {}", same.passed());
    let other = Model::from_weights(&cfg, &random_weights(&cfg, InitOptions::seeded(2)))?;
    let report = verify_golden(&other, &set)?;
    for l in report.layers.iter().take(4) {
        println!("  {:<18} {:.3e}", l.name, l.max_rel_error);
    }
    println!("other weights: passed {}", report.passed());
    Ok(())
}
