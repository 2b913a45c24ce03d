//! Golden parity. Set `DCCRN_GOLDEN_DIR` to a directory holding `<name>.dcg`
//! vector sets, each next to the `<name>.dcw` weights it was recorded with.

mod common;

use std::path::PathBuf;

use common::*;
use dccrn::io::{load_weights, verify_golden, GoldenVectorSet};
use dccrn::model::{random_weights, InitOptions};
use dccrn::{Error, Model, ModelConfig, Variant};

fn golden_pairs() -> Option<Vec<(PathBuf, PathBuf)>> {
    let dir = PathBuf::from(std::env::var_os("DCCRN_GOLDEN_DIR")?);
    let mut pairs: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "dcg"))
        .map(|g| {
            let w = g.with_extension("dcw");
            (g, w)
        })
        .collect();
    pairs.sort();
    Some(pairs)
}

#[test]
fn reference_checkpoints_match() {
    let Some(pairs) = golden_pairs() else {
        eprintln!("DCCRN_GOLDEN_DIR not set; skipping golden parity");
        return;
    };
    assert!(!pairs.is_empty(), "no .dcg files in DCCRN_GOLDEN_DIR");
    for (g, w) in pairs {
        let (cfg, store) = load_weights(&w).unwrap_or_else(|e| panic!("{}: {e}", w.display()));
        let model = Model::from_weights(&cfg, &store).unwrap();
        let golden = GoldenVectorSet::load(&g).unwrap();
        let report = verify_golden(&model, &golden).unwrap();
        for l in &report.layers {
            eprintln!("{}: {:<14} {:.3e}", g.display(), l.name, l.max_rel_error);
        }
        let worst = report.worst().unwrap();
        assert!(
            report.passed(),
            "{}: {} off by {:.3e} (tolerance {:.0e})",
            g.display(),
            worst.name,
            worst.max_rel_error,
            report.tolerance
        );
    }
}

fn recorded() -> (Model, GoldenVectorSet) {
    let cfg = ModelConfig::adopted(Variant::PROPOSED);
    let model = Model::from_weights(&cfg, &random_weights(&cfg, InitOptions::seeded(13))).unwrap();
    let set = GoldenVectorSet::record(&model, &random_frames(4, 257, 2)).unwrap();
    (model, set)
}

#[test]
fn recorded_set_survives_a_file_roundtrip() {
    let (model, set) = recorded();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("probe.dcg");
    set.save(&path).unwrap();
    let back = GoldenVectorSet::load(&path).unwrap();
    assert_eq!(back, set);
    let report = verify_golden(&model, &back).unwrap();
    assert!(report.passed());
    let names: Vec<_> = report.layers.iter().map(|l| l.name.as_str()).collect();
    for want in ["output", "trace.encoder.0", "trace.lstm", "trace.dense", "trace.pathway.5", "trace.decoder.5"] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
    assert_eq!(set.tensors["input"].shape, vec![4, 257, 2]);
    assert_eq!(set.tensors["output"].shape, vec![4, 4, 257, 2]);
}

#[test]
fn perturbed_layer_is_singled_out() {
    let (model, mut set) = recorded();
    let t = set.tensors.get_mut("trace.decoder.3").unwrap();
    t.data[10] += 1.0;
    let report = verify_golden(&model, &set).unwrap();
    assert!(!report.passed());
    assert_eq!(report.worst().unwrap().name, "trace.decoder.3");
}

#[test]
fn foreign_config_is_refused() {
    let (_, set) = recorded();
    let cfg = ModelConfig::adopted(Variant::BASELINE);
    let other = Model::from_weights(&cfg, &random_weights(&cfg, InitOptions::seeded(13))).unwrap();
    assert!(matches!(verify_golden(&other, &set), Err(Error::ConfigHash { .. })));
}
