mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;
use dccrn::io::{read_wav, write_wav, AudioBuffer, SampleFormat};
use serde_json::Value;

fn dccrn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dccrn")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = dccrn(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    dccrn(args).status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Bin-centred tones: nothing at Nyquist, so an identity mask is exact.
fn tones(len: usize) -> Vec<f32> {
    (0..len)
        .map(|n| {
            let ph = 2.0 * std::f32::consts::PI * n as f32 / 512.0;
            0.3 * (21.0 * ph).sin() + 0.2 * (64.0 * ph).cos()
        })
        .collect()
}

#[test]
fn params_lists_every_variant() {
    let out = ok(&["params"]);
    assert!(out.contains("mask, non-causal, single-frame"));
    assert!(out.lines().any(|l| l.contains("+CP") && l.contains("2608808")));
    assert!(out.lines().any(|l| l.starts_with("mask, causal, single-frame") && l.contains("2802050")));
    assert_eq!(out.lines().count(), 10);
}

#[test]
fn latency_reports_both_causalities() {
    let v: Value = serde_json::from_str(&ok(&["latency"])).unwrap();
    assert_eq!(v["schema"], "dccrn.latency.v1");
    assert_eq!(v["comparison"]["causal"]["algorithmic_latency_ms"], 32.0);
    assert_eq!(v["comparison"]["non_causal"]["algorithmic_latency_ms"], 48.0);
    assert_eq!(v["comparison"]["relative_increase"], 0.5);
}

#[test]
fn windows_dump_full_rectangular() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("l.csv");
    ok(&["windows", "--mode", "full", "--window", "rectangular", "--dump", p(&csv)]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,analysis,synthesis"));
    let rows: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(rows.len(), 512);
    assert!(rows.iter().all(|v| (v - 0.1).abs() < 1e-12));
}

#[test]
fn identity_enhance_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let (w, input, out) = (dir.path().join("id.dcw"), dir.path().join("in.wav"), dir.path().join("out.wav"));
    ok(&["init", "--preset", "baseline", "--identity", "--out", p(&w)]);
    let x = tones(8000);
    write_wav(&input, &AudioBuffer::new(x.clone(), 16_000, SampleFormat::Float32)).unwrap();
    ok(&["enhance", "--weights", p(&w), "--in", p(&input), "--out", p(&out)]);
    let y = read_wav(&out).unwrap();
    assert_eq!(y.samples.len(), x.len());
    for i in 384..x.len() - 512 {
        assert!((y.samples[i] - x[i]).abs() < 1e-5, "sample {i}");
    }
}

#[test]
fn stream_reports_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let (w, input, out) = (dir.path().join("p.dcw"), dir.path().join("in.wav"), dir.path().join("out.wav"));
    ok(&["init", "--seed", "3", "--out", p(&w)]);
    write_wav(&input, &AudioBuffer::new(noise(4000, 1), 16_000, SampleFormat::Pcm16)).unwrap();
    let v: Value =
        serde_json::from_str(&ok(&["stream", "--weights", p(&w), "--in", p(&input), "--chunk", "64", "--out", p(&out)]))
            .unwrap();
    assert_eq!(v["schema"], "dccrn.stream.v1");
    assert_eq!(v["first_output_after_samples"], 512);
    assert_eq!(v["samples_out"], 4000);
    assert_eq!(read_wav(&out).unwrap().samples.len(), 4000);
}

#[test]
fn non_causal_stream_needs_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let (w, input) = (dir.path().join("b.dcw"), dir.path().join("in.wav"));
    ok(&["init", "--preset", "baseline", "--out", p(&w)]);
    write_wav(&input, &AudioBuffer::new(noise(2000, 1), 16_000, SampleFormat::Float32)).unwrap();
    assert_eq!(code(&["stream", "--weights", p(&w), "--in", p(&input)]), 2);
    let v: Value =
        serde_json::from_str(&ok(&["stream", "--weights", p(&w), "--in", p(&input), "--simulate"])).unwrap();
    assert_eq!(v["first_output_after_samples"], 768);
}

#[test]
fn metrics_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let clean = noise(4000, 1);
    let noisy: Vec<f32> = clean.iter().zip(noise(4000, 2)).map(|(c, n)| c + 0.5 * n).collect();
    let enhanced: Vec<f32> = clean.iter().zip(noise(4000, 3)).map(|(c, n)| c + 0.1 * n).collect();
    let mut paths = Vec::new();
    for (name, x) in [("c", clean), ("n", noisy), ("e", enhanced)] {
        let path = dir.path().join(format!("{name}.wav"));
        write_wav(&path, &AudioBuffer::new(x, 16_000, SampleFormat::Float32)).unwrap();
        paths.push(path);
    }
    let v: Value = serde_json::from_str(&ok(&[
        "metrics",
        "--clean",
        p(&paths[0]),
        "--noisy",
        p(&paths[1]),
        "--enhanced",
        p(&paths[2]),
    ]))
    .unwrap();
    assert_eq!(v["schema"], "dccrn.metrics.v1");
    assert_eq!(v["files"].as_array().unwrap().len(), 1);
    assert!(v["mean"]["delta_si_sdr_db"].as_f64().unwrap() > 10.0, "{v}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.dcw");
    let junk = dir.path().join("junk.dcw");
    std::fs::write(&junk, b"DCW1\x02\x00\x00\x00{}").unwrap();
    let wav = dir.path().join("x.wav");
    write_wav(&wav, &AudioBuffer::new(noise(600, 1), 16_000, SampleFormat::Float32)).unwrap();
    let out = dir.path().join("o.wav");

    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["stream", "--weights", p(&junk), "--in", p(&wav), "--chunk", "0"]), 2);
    assert_eq!(code(&["metrics", "--clean", "a", "--noisy", "b", "--enhanced", "c", "--gamma", "2"]), 2);
    assert_eq!(code(&["enhance", "--weights", p(&missing), "--in", p(&wav), "--out", p(&out)]), 3);
    assert_eq!(code(&["enhance", "--weights", p(&junk), "--in", p(&wav), "--out", p(&out)]), 4);
    assert_eq!(code(&["init", "--identity", "--out", p(&dir.path().join("i.dcw"))]), 4);
}
