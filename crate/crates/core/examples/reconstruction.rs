//! Identity estimator through every synthesis mode: the output equals the
//! input once the first frame has been seen.

use dccrn::framing::{FrameConfig, SynthesisMode};
use dccrn::model::enhance_offline;
use dccrn::IdentityEstimator;
use rand::{Rng, SeedableRng};

fn main() -> dccrn::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let x: Vec<f32> = (0..16_000).map(|_| rng.gen_range(-0.5..0.5)).collect();
    for mode in [SynthesisMode::SingleFrame, SynthesisMode::PartialSum, SynthesisMode::FullSum] {
        let est = IdentityEstimator::new(FrameConfig::default(), mode)?;
        let y = enhance_offline(&est, &x)?;
        let err = x[512..x.len() - 512]
            .iter()
            .zip(&y[512..])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f32, f32::max);
        println!("{:<12} max |x - y| = {err:.2e}", mode.as_str());
    }
    Ok(())
}
