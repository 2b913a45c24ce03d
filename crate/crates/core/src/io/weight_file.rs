//! DCW1: a single-file weight container with the model configuration embedded.
//!
//! Layout: the ASCII magic `DCW1`, the manifest length as a little-endian
//! `u32`, the manifest as UTF-8 JSON, then the payload of little-endian `f32`
//! tensors. The manifest holds `format_version`, `config` (a
//! [`ModelConfig`]) and `tensors`, a table of `{name, dtype, shape, offset,
//! length, crc32}` with offsets and lengths in bytes relative to the payload.

use std::path::Path;

use serde_json::{Map, Value};

use super::container;
use crate::complex_nn::WeightStore;
use crate::error::{Error, Result};
use crate::model::ModelConfig;

pub const WEIGHT_MAGIC: &[u8; 4] = b"DCW1";

pub fn weights_to_bytes(cfg: &ModelConfig, store: &WeightStore) -> Vec<u8> {
    let mut manifest = Map::new();
    manifest.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    container::encode(WEIGHT_MAGIC, manifest, store.iter().map(|(k, t)| (k.as_str(), t)))
}

/// Decodes a weight file and checks every tensor the configuration needs
/// against the stored shapes.
pub fn weights_from_bytes(bytes: &[u8]) -> Result<(ModelConfig, WeightStore)> {
    let (mut manifest, tensors) = container::decode(WEIGHT_MAGIC, bytes)?;
    let cfg_value = manifest
        .remove("config")
        .ok_or_else(|| Error::Format("manifest lacks config".into()))?;
    let cfg: ModelConfig = serde_json::from_value::<ModelConfig>(cfg_value)?;
    cfg.validate()?;
    for entry in cfg.tensor_manifest() {
        match tensors.get(&entry.path) {
            None => return Err(Error::MissingTensor(entry.path)),
            Some(t) if t.shape != entry.shape => {
                return Err(Error::ShapeConflict {
                    detail: format!("config expects {:?}, payload has {:?}", entry.shape, t.shape),
                    tensor: entry.path,
                })
            }
            Some(_) => {}
        }
    }
    let mut store = WeightStore::new();
    for (name, t) in tensors {
        store.insert(name, t);
    }
    Ok((cfg, store))
}

pub fn save_weights(path: impl AsRef<Path>, cfg: &ModelConfig, store: &WeightStore) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, weights_to_bytes(cfg, store)).map_err(|e| Error::io(path, e))
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<(ModelConfig, WeightStore)> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    weights_from_bytes(&bytes)
}

/// The manifest of a weight file as JSON, without decoding the payload.
pub fn read_manifest(bytes: &[u8]) -> Result<Value> {
    if bytes.len() < 8 || &bytes[..4] != WEIGHT_MAGIC {
        return Err(Error::Format("missing DCW1 magic".into()));
    }
    let len = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let json = bytes
        .get(8..8 + len)
        .ok_or_else(|| Error::Format("manifest length exceeds file size".into()))?;
    Ok(serde_json::from_slice(json)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_weights, InitOptions, Variant};

    #[test]
    fn round_trip_is_bit_exact() {
        let cfg = ModelConfig::adopted(Variant::PROPOSED);
        let store = random_weights(&cfg, InitOptions::seeded(3));
        let (cfg2, store2) = weights_from_bytes(&weights_to_bytes(&cfg, &store)).unwrap();
        assert_eq!(cfg2, cfg);
        assert_eq!(store2, store);
    }

    #[test]
    fn manifest_is_readable_json() {
        let cfg = ModelConfig::adopted(Variant::BASELINE);
        let bytes = weights_to_bytes(&cfg, &random_weights(&cfg, InitOptions::seeded(0)));
        let m = read_manifest(&bytes).unwrap();
        assert_eq!(m["format_version"], 1);
        assert_eq!(m["config"]["head"], "mask");
        assert!(m["tensors"].as_array().unwrap().iter().any(|t| t["name"] == "dense.real.weight"));
    }
}
