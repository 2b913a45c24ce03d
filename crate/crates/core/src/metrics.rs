//! Scale-invariant SNR, the SI-SNR + magnitude loss and SI-SDR reporting.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framing::{stft, FrameConfig};

/// Weight of the SI-SNR term in the combined loss.
pub const LOSS_GAMMA: f64 = 0.995;

/// Cap applied to infinite SI-SNR values in aggregate reports.
pub const DEFAULT_CAP_DB: f64 = 120.0;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SiSnrOptions {
    /// Subtract each signal's mean before projecting.
    pub zero_mean: bool,
    /// Replace values above this (including `+inf`) by the cap.
    pub cap_db: Option<f64>,
}

/// How the magnitude L1 distance is reduced over bins and frames.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    #[default]
    Mean,
    Sum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LossConfig {
    pub gamma: f64,
    /// Same `W` and `P` as the processing path, rectangular window.
    pub mag_stft: FrameConfig,
    pub reduction: Reduction,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig::for_frame(&FrameConfig::default())
    }
}

impl LossConfig {
    pub fn for_frame(frame: &FrameConfig) -> Self {
        LossConfig {
            gamma: LOSS_GAMMA,
            mag_stft: frame.rectangular(),
            reduction: Reduction::Mean,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }
}

fn check_pair(estimate: &[f32], reference: &[f32]) -> Result<()> {
    if estimate.len() != reference.len() {
        return Err(Error::LengthMismatch {
            what: "estimate vs reference",
            expected: reference.len(),
            got: estimate.len(),
        });
    }
    if reference.is_empty() {
        return Err(Error::ZeroReference);
    }
    Ok(())
}

fn to_f64(x: &[f32], zero_mean: bool) -> Vec<f64> {
    let mean = if zero_mean {
        x.iter().map(|&v| v as f64).sum::<f64>() / x.len() as f64
    } else {
        0.0
    };
    x.iter().map(|&v| v as f64 - mean).collect()
}

/// SI-SNR in dB; `+inf` when the estimate is a scaled copy of the reference.
pub fn si_snr(estimate: &[f32], reference: &[f32]) -> Result<f64> {
    si_snr_with(estimate, reference, SiSnrOptions::default())
}

pub fn si_snr_with(estimate: &[f32], reference: &[f32], opts: SiSnrOptions) -> Result<f64> {
    check_pair(estimate, reference)?;
    let est = to_f64(estimate, opts.zero_mean);
    let s = to_f64(reference, opts.zero_mean);
    let ss: f64 = s.iter().map(|v| v * v).sum();
    if ss == 0.0 {
        return Err(Error::ZeroReference);
    }
    let dot: f64 = est.iter().zip(&s).map(|(a, b)| a * b).sum();
    let alpha = dot / ss;
    let mut target = 0.0;
    let mut noise = 0.0;
    for (e, r) in est.iter().zip(&s) {
        let t = alpha * r;
        target += t * t;
        noise += (e - t) * (e - t);
    }
    let db = if noise == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (target / noise).log10()
    };
    Ok(match opts.cap_db {
        Some(cap) if db > cap => cap,
        _ => db,
    })
}

/// Scale-invariant SDR; identical to [`si_snr`] and named for reporting.
pub fn si_sdr(estimate: &[f32], reference: &[f32]) -> Result<f64> {
    si_snr(estimate, reference)
}

/// `si_sdr(enhanced, clean) - si_sdr(noisy, clean)`.
pub fn si_sdr_improvement(enhanced: &[f32], noisy: &[f32], clean: &[f32]) -> Result<f64> {
    Ok(si_sdr(enhanced, clean)? - si_sdr(noisy, clean)?)
}

fn magnitudes(x: &[f64], cfg: &FrameConfig) -> Result<Vec<f64>> {
    Ok(stft(x, cfg)?.as_slice().iter().map(|c| c.norm()).collect())
}

/// L1 distance between rectangular-window magnitude spectrograms.
pub fn magnitude_l1(estimate: &[f32], reference: &[f32], cfg: &LossConfig) -> Result<f64> {
    check_pair(estimate, reference)?;
    let a = magnitudes(&to_f64(estimate, false), &cfg.mag_stft)?;
    let b = magnitudes(&to_f64(reference, false), &cfg.mag_stft)?;
    let sum: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
    Ok(match cfg.reduction {
        Reduction::Sum => sum,
        Reduction::Mean => sum / a.len() as f64,
    })
}

/// `gamma * (-SI-SNR) + (1 - gamma) * L1`. With `gamma == 0` the SI-SNR term
/// is dropped, so a perfect estimate does not turn the loss into NaN.
pub fn si_snr_mag_loss(estimate: &[f32], reference: &[f32], cfg: &LossConfig) -> Result<f64> {
    let snr = si_snr(estimate, reference)?;
    let mag = magnitude_l1(estimate, reference, cfg)?;
    let snr_term = if cfg.gamma == 0.0 { 0.0 } else { cfg.gamma * -snr };
    Ok(snr_term + (1.0 - cfg.gamma) * mag)
}

/// Analytic gradient of [`magnitude_l1`] with respect to every estimate sample.
///
/// Bins where the estimate magnitude is zero or equal to the reference
/// magnitude contribute a zero subgradient.
pub fn magnitude_l1_gradient(estimate: &[f32], reference: &[f32], cfg: &LossConfig) -> Result<Vec<f64>> {
    check_pair(estimate, reference)?;
    let fc = &cfg.mag_stft;
    let est = to_f64(estimate, false);
    let xa = stft(&est, fc)?;
    let xb = stft(&to_f64(reference, false), fc)?;
    let (w, p) = (fc.frame_len, fc.hop);
    let g = fc.analysis_window();
    let norm = match cfg.reduction {
        Reduction::Sum => 1.0,
        Reduction::Mean => 1.0 / (xa.bins() * xa.frames()) as f64,
    };
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(w);
    let mut grad = vec![0.0; est.len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); w];
    for t in 0..xa.frames() {
        buf.fill(Complex64::new(0.0, 0.0));
        for f in 0..xa.bins() {
            let x = xa.get(f, t);
            let (ma, mb) = (x.norm(), xb.get(f, t).norm());
            if ma > 0.0 && ma != mb {
                buf[f] = x / ma * (ma - mb).signum();
            }
        }
        // d|X_f|/dx[n] = Re(X_f / |X_f| * e^{+i 2 pi f n / W}) * g[n]
        ifft.process(&mut buf);
        for n in 0..w {
            grad[t * p + n] += buf[n].re * g[n] * norm;
        }
    }
    Ok(grad)
}

/// Per-file metrics; perceptual scores are placeholders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub si_sdr_enhanced_db: f64,
    pub si_sdr_noisy_db: f64,
    pub delta_si_sdr_db: f64,
    pub si_snr_loss: f64,
    pub si_snr_mag_loss: f64,
    pub gamma: f64,
    /// True when an infinite SI-SDR was replaced by the cap.
    pub capped: bool,
    pub stoi: String,
    pub pesq: String,
}

pub const REPORT_SCHEMA: &str = "dccrn.metrics.v1";

impl MetricReport {
    pub fn compute(clean: &[f32], noisy: &[f32], enhanced: &[f32], loss: &LossConfig) -> Result<Self> {
        let opts = SiSnrOptions {
            zero_mean: false,
            cap_db: Some(DEFAULT_CAP_DB),
        };
        let raw = si_snr(enhanced, clean)?;
        let enh = si_snr_with(enhanced, clean, opts)?;
        let noi = si_snr_with(noisy, clean, opts)?;
        let mag = magnitude_l1(enhanced, clean, loss)?;
        Ok(MetricReport {
            si_sdr_enhanced_db: enh,
            si_sdr_noisy_db: noi,
            delta_si_sdr_db: enh - noi,
            si_snr_loss: -enh,
            si_snr_mag_loss: loss.gamma * -enh + (1.0 - loss.gamma) * mag,
            gamma: loss.gamma,
            capped: raw.is_infinite() || noi >= DEFAULT_CAP_DB,
            stoi: "not computed".into(),
            pesq: "not computed".into(),
        })
    }

    pub fn to_json(&self) -> String {
        report_json(std::slice::from_ref(self))
    }
}

/// JSON document with per-file entries and their means.
pub fn report_json(reports: &[MetricReport]) -> String {
    let n = reports.len().max(1) as f64;
    let avg = |f: fn(&MetricReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let doc = serde_json::json!({
        "schema": REPORT_SCHEMA,
        "files": reports,
        "mean": {
            "si_sdr_enhanced_db": avg(|r| r.si_sdr_enhanced_db),
            "si_sdr_noisy_db": avg(|r| r.si_sdr_noisy_db),
            "delta_si_sdr_db": avg(|r| r.delta_si_sdr_db),
            "si_snr_mag_loss": avg(|r| r.si_snr_mag_loss),
        },
    });
    serde_json::to_string_pretty(&doc).expect("report serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_case_is_zero_db() {
        assert!(si_snr(&[1.0, 1.0], &[1.0, 0.0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn collinear_estimate_is_infinite() {
        let s = [0.5, -0.25, 1.0];
        let e: Vec<f32> = s.iter().map(|v| 2.0 * v).collect();
        assert_eq!(si_snr(&e, &s).unwrap(), f64::INFINITY);
        let capped = si_snr_with(&e, &s, SiSnrOptions { cap_db: Some(120.0), ..Default::default() }).unwrap();
        assert_eq!(capped, 120.0);
    }

    #[test]
    fn zero_reference_and_length_errors() {
        assert!(matches!(si_snr(&[1.0, 2.0], &[0.0, 0.0]), Err(Error::ZeroReference)));
        assert!(matches!(si_snr(&[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn zero_mean_flag_changes_offset_signals() {
        let s = [1.0, 2.0, 3.0, 4.0];
        let e = [1.5, 2.0, 3.5, 4.0];
        let plain = si_snr(&e, &s).unwrap();
        let centered = si_snr_with(&e, &s, SiSnrOptions { zero_mean: true, cap_db: None }).unwrap();
        assert!(plain.is_finite() && centered.is_finite());
        assert!((plain - centered).abs() > 1e-3);
    }

    #[test]
    fn perfect_estimate_has_zero_magnitude_term() {
        let s: Vec<f32> = (0..1024).map(|i| ((i * 37) % 11) as f32 / 11.0 - 0.5).collect();
        assert_eq!(magnitude_l1(&s, &s, &LossConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn report_marks_perceptual_scores() {
        let s: Vec<f32> = (0..600).map(|i| (i as f32 * 0.05).sin()).collect();
        let n: Vec<f32> = s.iter().enumerate().map(|(i, v)| v + 0.1 * (i as f32 * 1.3).cos()).collect();
        let r = MetricReport::compute(&s, &n, &s, &LossConfig::default()).unwrap();
        assert!(r.capped);
        assert_eq!(r.si_sdr_enhanced_db, DEFAULT_CAP_DB);
        let json = r.to_json();
        assert!(json.contains("not computed") && json.contains(REPORT_SCHEMA));
    }
}
