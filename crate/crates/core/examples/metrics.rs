//! SI-SNR, the magnitude loss and the SI-SDR improvement on a synthetic
//! clean/noisy/enhanced triple.

use dccrn::framing::FrameConfig;
use dccrn::metrics::{si_snr, si_snr_mag_loss, LossConfig, MetricReport};
use rand::{Rng, SeedableRng};

fn main() -> dccrn::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let clean: Vec<f32> = (0..16_000).map(|n| 0.4 * (n as f32 * 0.031).sin()).collect();
    let noise: Vec<f32> = (0..clean.len()).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let noisy: Vec<f32> = clean.iter().zip(&noise).map(|(c, n)| c + n).collect();
    let enhanced: Vec<f32> = clean.iter().zip(&noise).map(|(c, n)| c + 0.1 * n).collect();

    let loss = LossConfig::for_frame(&FrameConfig::default());
    println!("SI-SNR noisy    {:6.2} dB", si_snr(&noisy, &clean)?);
    println!("SI-SNR enhanced {:6.2} dB", si_snr(&enhanced, &clean)?);
    println!("loss (gamma {}) {:.4}", loss.gamma, si_snr_mag_loss(&enhanced, &clean, &loss)?);
    println!("{}", MetricReport::compute(&clean, &noisy, &enhanced, &loss)?.to_json());
    Ok(())
}
