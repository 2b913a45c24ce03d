use std::f64::consts::PI;

use super::FrameConfig;
use crate::error::{Error, Result};

/// Periodic (DFT-even) Hann window of length `n`.
pub fn periodic_hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SynthesisMode {
    SingleFrame,
    PartialSum,
    FullSum,
}

impl SynthesisMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SynthesisMode::SingleFrame => "single_frame",
            SynthesisMode::PartialSum => "partial_sum",
            SynthesisMode::FullSum => "full_sum",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisWindow {
    pub mode: SynthesisMode,
    pub taps: Vec<f64>,
}

/// Overlap-add normalization for sample `n` of a frame.
///
/// Sums the squared analysis window over the `K` frame positions that share
/// `n mod P`. Full summation weights the frame at overlap offset `e` by `e + 1`,
/// the number of predictions of that frame which reach the sub-frame.
pub fn window_denominator(g: &[f64], hop: usize, n: usize, mode: SynthesisMode) -> f64 {
    let k = g.len() / hop;
    let r = n % hop;
    (0..k)
        .map(|e| {
            let sq = g[e * hop + r] * g[e * hop + r];
            match mode {
                SynthesisMode::FullSum => (e + 1) as f64 * sq,
                SynthesisMode::SingleFrame | SynthesisMode::PartialSum => sq,
            }
        })
        .sum()
}

pub fn make_synthesis_window(cfg: &FrameConfig, mode: SynthesisMode) -> Result<SynthesisWindow> {
    cfg.validate()?;
    let g = cfg.analysis_window();
    let taps = (0..cfg.frame_len)
        .map(|n| {
            let den = window_denominator(&g, cfg.hop, n, mode);
            if den == 0.0 {
                Err(Error::WindowCondition { index: n })
            } else {
                Ok(g[n] / den)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SynthesisWindow { mode, taps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framing::WindowKind;

    #[test]
    fn rectangular_windows() {
        let cfg = FrameConfig::default().rectangular();
        let partial = make_synthesis_window(&cfg, SynthesisMode::PartialSum).unwrap();
        let full = make_synthesis_window(&cfg, SynthesisMode::FullSum).unwrap();
        assert!(partial.taps.iter().all(|&v| (v - 0.25).abs() < 1e-12));
        assert!(full.taps.iter().all(|&v| (v - 0.1).abs() < 1e-12));
    }

    #[test]
    fn hann_partial_is_scaled_analysis_window() {
        let cfg = FrameConfig::default();
        let g = cfg.analysis_window();
        // brute-force sum of squared overlapping Hann windows at hop W/4
        for r in 0..cfg.hop {
            let direct: f64 = (0..4).map(|e| g[e * 128 + r].powi(2)).sum();
            assert!((direct - 1.5).abs() < 1e-12, "r={r}: {direct}");
        }
        let l = make_synthesis_window(&cfg, SynthesisMode::PartialSum).unwrap();
        for n in 0..512 {
            assert!((l.taps[n] * 1.5 - g[n]).abs() < 1e-12);
        }
    }

    #[test]
    fn single_and_partial_coincide() {
        let cfg = FrameConfig::default();
        let a = make_synthesis_window(&cfg, SynthesisMode::SingleFrame).unwrap();
        let b = make_synthesis_window(&cfg, SynthesisMode::PartialSum).unwrap();
        assert_eq!(a.taps, b.taps);
    }

    #[test]
    fn denominator_depends_on_residue_only() {
        let cfg = FrameConfig::default();
        let g = cfg.analysis_window();
        for mode in [SynthesisMode::PartialSum, SynthesisMode::FullSum] {
            for n in 0..cfg.frame_len {
                assert_eq!(
                    window_denominator(&g, cfg.hop, n, mode),
                    window_denominator(&g, cfg.hop, n % cfg.hop, mode)
                );
            }
        }
    }

    #[test]
    fn hann_has_unit_peak() {
        let g = periodic_hann(512);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[256], 1.0);
        assert!((g[1] - g[511]).abs() < 1e-15);
    }

    #[test]
    fn zero_window_is_rejected() {
        let cfg = FrameConfig {
            window: WindowKind::Custom(vec![0.0; 8]),
            frame_len: 8,
            hop: 2,
            sample_rate: 16_000,
        };
        assert!(matches!(
            make_synthesis_window(&cfg, SynthesisMode::FullSum),
            Err(Error::WindowCondition { .. })
        ));
    }
}
