//! Synthesis windows for each overlap-add mode, printed every 32 taps.

use dccrn::framing::{make_synthesis_window, FrameConfig, SynthesisMode};

fn main() -> dccrn::Result<()> {
    let cfg = FrameConfig::default();
    let g = cfg.analysis_window();
    let modes = [SynthesisMode::SingleFrame, SynthesisMode::PartialSum, SynthesisMode::FullSum];
    let windows = modes
        .iter()
        .map(|&m| make_synthesis_window(&cfg, m))
        .collect::<dccrn::Result<Vec<_>>>()?;
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "n", "analysis", "single", "partial", "full");
    for n in (0..cfg.frame_len).step_by(32) {
        println!(
            "{n:>4} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            g[n], windows[0].taps[n], windows[1].taps[n], windows[2].taps[n]
        );
    }
    Ok(())
}
