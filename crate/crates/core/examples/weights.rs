//! Write a weight container, list its manifest and load it back.

use dccrn::io::weight_file::read_manifest;
use dccrn::io::{weights_from_bytes, weights_to_bytes};
use dccrn::model::{random_weights, InitOptions};
use dccrn::{ModelConfig, Variant};

fn main() -> dccrn::Result<()> {
    let cfg = ModelConfig::adopted(Variant::PROPOSED);
    let store = random_weights(&cfg, InitOptions::seeded(1));
    let bytes = weights_to_bytes(&cfg, &store);
    println!("{} tensors, {} bytes, config {}", store.len(), bytes.len(), cfg.config_hash());

    let manifest = read_manifest(&bytes)?;
    for t in manifest["tensors"].as_array().into_iter().flatten().take(8) {
        println!("  {:<36} {}", t["name"].as_str().unwrap_or("?"), t["shape"]);
    }
    let (cfg2, store2) = weights_from_bytes(&bytes)?;
    println!("roundtrip equal: {}", cfg2 == cfg && store2 == store);
    Ok(())
}
