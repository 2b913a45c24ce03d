//! Algorithmic latency of the causal and non-causal networks, and the
//! observed delay before a real-time stream emits its first samples.

use dccrn::model::{random_weights, InitOptions};
use dccrn::streaming::latency_comparison;
use dccrn::{Model, ModelConfig, StreamEngine, Variant};

fn main() -> dccrn::Result<()> {
    let cfg = ModelConfig::adopted(Variant::PROPOSED);
    let cmp = latency_comparison(&cfg)?;
    for (name, r) in [("causal", cmp.causal), ("non-causal", cmp.non_causal)] {
        println!(
            "{name:<11} {} sub-frames, {} samples, {:.0} ms",
            r.lookahead_subframes, r.algorithmic_latency_samples, r.algorithmic_latency_ms
        );
    }
    println!("increase    {:.0}%", 100.0 * cmp.relative_increase);

    let model = Model::from_weights(&cfg, &random_weights(&cfg, InitOptions::seeded(1)))?;
    let mut stream = StreamEngine::real_time(&model)?;
    let mut fed = 0;
    while stream.push(&[0.0])?.is_empty() {
        fed += 1;
    }
    println!("first output after {} samples", fed + 1);
    Ok(())
}
