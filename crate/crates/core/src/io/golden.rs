//! DCG1 golden vector sets for cross-implementation parity.
//!
//! Same container layout as DCW1 with the magic `DCG1`. The manifest holds
//! `config_hash` (see [`ModelConfig::config_hash`]), `tolerance` and the
//! tensor table. Complex tensors carry a trailing axis of 2 (real,
//! imaginary):
//!
//! - `input`: `[T, W/2 + 1, 2]`, the noisy spectrum frames fed one per step;
//! - `trace.<name>`: `[N, C, F, 2]`, every output of block `<name>` in step
//!   order, where `<name>` is a trace name of the streaming forward pass
//!   (`encoder.<i>`, `lstm`, `dense`, `pathway.<j>`, `decoder.<j>`);
//! - `output`: `[N, S, W/2 + 1, 2]`, every emitted prediction stack.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex32;
use serde_json::{Map, Value};

use super::container;
use crate::complex_nn::{ComplexTensor, Tensor};
use crate::error::{Error, Result};
use crate::model::{FrameStack, Model, Trace};

pub const GOLDEN_MAGIC: &[u8; 4] = b"DCG1";
pub const DEFAULT_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenVectorSet {
    pub config_hash: String,
    pub tolerance: f64,
    pub tensors: BTreeMap<String, Tensor>,
}

impl GoldenVectorSet {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut m = Map::new();
        m.insert("config_hash".into(), self.config_hash.clone().into());
        m.insert("tolerance".into(), self.tolerance.into());
        container::encode(GOLDEN_MAGIC, m, self.tensors.iter().map(|(k, t)| (k.as_str(), t)))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (m, tensors) = container::decode(GOLDEN_MAGIC, bytes)?;
        let config_hash = m
            .get("config_hash")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Format("golden manifest lacks config_hash".into()))?
            .to_string();
        let tolerance = m.get("tolerance").and_then(Value::as_f64).unwrap_or(DEFAULT_TOLERANCE);
        for (name, t) in &tensors {
            if t.data.iter().any(|v| !v.is_finite()) {
                return Err(Error::Format(format!("golden tensor `{name}` is not finite")));
            }
        }
        if !tensors.contains_key("input") {
            return Err(Error::MissingTensor("input".into()));
        }
        Ok(GoldenVectorSet {
            config_hash,
            tolerance,
            tensors,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    /// Records a run of `model` over `frames` in golden form.
    pub fn record(model: &Model, frames: &[Vec<Complex32>]) -> Result<Self> {
        let (trace, outputs) = run(model, frames)?;
        let mut tensors = BTreeMap::new();
        tensors.insert("input".into(), frames_tensor(frames));
        for (name, steps) in group(trace) {
            tensors.insert(format!("trace.{name}"), stack_activations(&steps));
        }
        tensors.insert("output".into(), stacks_tensor(&outputs));
        Ok(GoldenVectorSet {
            config_hash: model.config().config_hash(),
            tolerance: DEFAULT_TOLERANCE,
            tensors,
        })
    }

    pub fn input_frames(&self) -> Result<Vec<Vec<Complex32>>> {
        let t = &self.tensors["input"];
        if t.shape.len() != 3 || t.shape[2] != 2 {
            return Err(Error::ShapeConflict {
                tensor: "input".into(),
                detail: format!("expected [T, bins, 2], got {:?}", t.shape),
            });
        }
        let bins = t.shape[1];
        Ok(t.data
            .chunks_exact(2 * bins)
            .map(|fr| fr.chunks_exact(2).map(|c| Complex32::new(c[0], c[1])).collect())
            .collect())
    }
}

/// Largest deviation of one recorded tensor, relative to the peak magnitude
/// of the golden values.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerParity {
    pub name: String,
    pub max_rel_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParityReport {
    pub tolerance: f64,
    pub layers: Vec<LayerParity>,
}

impl ParityReport {
    pub fn passed(&self) -> bool {
        self.layers.iter().all(|l| l.max_rel_error <= self.tolerance)
    }

    pub fn worst(&self) -> Option<&LayerParity> {
        self.layers
            .iter()
            .max_by(|a, b| a.max_rel_error.total_cmp(&b.max_rel_error))
    }
}

/// Runs `model` on the golden input and compares every recorded tensor.
/// Refuses sets recorded for a different configuration.
pub fn verify_golden(model: &Model, golden: &GoldenVectorSet) -> Result<ParityReport> {
    let expected = model.config().config_hash();
    if golden.config_hash != expected {
        return Err(Error::ConfigHash {
            expected,
            found: golden.config_hash.clone(),
        });
    }
    let frames = golden.input_frames()?;
    let (trace, outputs) = run(model, &frames)?;
    let mut ours: BTreeMap<String, Tensor> = group(trace)
        .into_iter()
        .map(|(n, steps)| (format!("trace.{n}"), stack_activations(&steps)))
        .collect();
    ours.insert("output".into(), stacks_tensor(&outputs));
    let mut layers = Vec::new();
    for (name, want) in &golden.tensors {
        if name == "input" {
            continue;
        }
        let got = ours.get(name).ok_or_else(|| Error::MissingTensor(name.clone()))?;
        if got.shape != want.shape {
            return Err(Error::ShapeConflict {
                tensor: name.clone(),
                detail: format!("golden {:?}, engine {:?}", want.shape, got.shape),
            });
        }
        let peak = want.data.iter().fold(0.0f64, |m, v| m.max(v.abs() as f64));
        let diff = got
            .data
            .iter()
            .zip(&want.data)
            .fold(0.0f64, |m, (a, b)| m.max((*a as f64 - *b as f64).abs()));
        layers.push(LayerParity {
            name: name.clone(),
            max_rel_error: if peak > 0.0 { diff / peak } else { diff },
        });
    }
    Ok(ParityReport {
        tolerance: golden.tolerance,
        layers,
    })
}

fn run(model: &Model, frames: &[Vec<Complex32>]) -> Result<(Trace, Vec<FrameStack>)> {
    let mut st = model.init_state();
    let mut trace = Trace::new();
    let mut outputs = Vec::new();
    for f in frames {
        if let Some(stack) = model.forward_step_traced(f, &mut st, &mut trace)? {
            outputs.push(stack);
        }
    }
    trace.retain(|(n, _)| n != "input");
    Ok((trace, outputs))
}

fn group(trace: Trace) -> BTreeMap<String, Vec<ComplexTensor>> {
    let mut out: BTreeMap<String, Vec<ComplexTensor>> = BTreeMap::new();
    for (n, t) in trace {
        out.entry(n).or_default().push(t);
    }
    out
}

fn interleave(re: &[f32], im: &[f32], out: &mut Vec<f32>) {
    for (r, i) in re.iter().zip(im) {
        out.push(*r);
        out.push(*i);
    }
}

fn stack_activations(steps: &[ComplexTensor]) -> Tensor {
    let [c, f, _] = steps[0].shape();
    let mut data = Vec::new();
    for s in steps {
        interleave(s.re(), s.im(), &mut data);
    }
    Tensor {
        shape: vec![steps.len(), c, f, 2],
        data,
    }
}

fn frames_tensor(frames: &[Vec<Complex32>]) -> Tensor {
    let bins = frames.first().map_or(0, Vec::len);
    Tensor {
        shape: vec![frames.len(), bins, 2],
        data: frames.iter().flatten().flat_map(|c| [c.re, c.im]).collect(),
    }
}

fn stacks_tensor(stacks: &[FrameStack]) -> Tensor {
    let depth = stacks.first().map_or(0, Vec::len);
    let bins = stacks.first().and_then(|s| s.first()).map_or(0, Vec::len);
    Tensor {
        shape: vec![stacks.len(), depth, bins, 2],
        data: stacks.iter().flatten().flatten().flat_map(|c| [c.re, c.im]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_weights, InitOptions, ModelConfig, Variant};

    fn probe(n: usize) -> Vec<Vec<Complex32>> {
        (0..n)
            .map(|t| (0..257).map(|b| Complex32::new(((t + b) % 5) as f32 * 0.1, -0.05 * b as f32 / 257.0)).collect())
            .collect()
    }

    #[test]
    fn self_parity_and_hash_check() {
        let cfg = ModelConfig::adopted(Variant::PROPOSED);
        let model = Model::from_weights(&cfg, &random_weights(&cfg, InitOptions::seeded(4))).unwrap();
        let set = GoldenVectorSet::record(&model, &probe(3)).unwrap();
        let back = GoldenVectorSet::from_bytes(&set.to_bytes()).unwrap();
        assert_eq!(back, set);
        let report = verify_golden(&model, &back).unwrap();
        assert!(report.passed());
        assert_eq!(report.worst().unwrap().max_rel_error, 0.0);

        let other_cfg = ModelConfig::adopted(Variant::BASELINE);
        let other = Model::from_weights(&other_cfg, &random_weights(&other_cfg, InitOptions::seeded(4))).unwrap();
        assert!(matches!(verify_golden(&other, &set), Err(Error::ConfigHash { .. })));
    }
}
