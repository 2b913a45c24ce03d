use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::complex_nn::Tensor;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// One entry of the tensor table. `offset` is relative to the payload start;
/// `length` is in bytes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorRecord {
    pub name: String,
    pub dtype: String,
    pub shape: Vec<usize>,
    pub offset: u64,
    pub length: u64,
    pub crc32: u32,
}

/// `magic | u32 LE manifest length | manifest JSON | payload`.
pub fn encode<'a>(
    magic: &[u8; 4],
    mut manifest: Map<String, Value>,
    tensors: impl IntoIterator<Item = (&'a str, &'a Tensor)>,
) -> Vec<u8> {
    let mut payload = Vec::new();
    let mut table = Vec::new();
    for (name, t) in tensors {
        let start = payload.len();
        for v in &t.data {
            payload.extend_from_slice(&v.to_le_bytes());
        }
        table.push(TensorRecord {
            name: name.to_string(),
            dtype: "f32".into(),
            shape: t.shape.clone(),
            offset: start as u64,
            length: (payload.len() - start) as u64,
            crc32: crc32fast::hash(&payload[start..]),
        });
    }
    manifest.insert("format_version".into(), FORMAT_VERSION.into());
    manifest.insert("tensors".into(), serde_json::to_value(table).expect("table serializes"));
    let json = serde_json::to_vec(&Value::Object(manifest)).expect("manifest serializes");
    let mut out = Vec::with_capacity(8 + json.len() + payload.len());
    out.extend_from_slice(magic);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    out.extend_from_slice(&payload);
    out
}

/// Parses and validates a container; returns the manifest (without the
/// tensor table) and the tensors by name.
pub fn decode(magic: &[u8; 4], bytes: &[u8]) -> Result<(Map<String, Value>, BTreeMap<String, Tensor>)> {
    if bytes.len() < 8 || &bytes[..4] != magic {
        return Err(Error::Format(format!(
            "missing {} magic",
            String::from_utf8_lossy(magic)
        )));
    }
    let len = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if len > body.len() {
        return Err(Error::Format(format!(
            "manifest length {len} exceeds file size"
        )));
    }
    let mut manifest: Map<String, Value> = serde_json::from_slice(&body[..len])?;
    let version = manifest
        .get("format_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Format("manifest lacks format_version".into()))?;
    if version != FORMAT_VERSION as u64 {
        return Err(Error::FormatVersion(version as u32));
    }
    let table: Vec<TensorRecord> = serde_json::from_value(
        manifest
            .remove("tensors")
            .ok_or_else(|| Error::Format("manifest lacks tensor table".into()))?,
    )?;
    let payload = &body[len..];

    let mut spans: Vec<(u64, u64, &str)> = table
        .iter()
        .map(|r| (r.offset, r.offset + r.length, r.name.as_str()))
        .collect();
    spans.sort();
    for w in spans.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(Error::Format(format!("tensors `{}` and `{}` overlap", w[0].2, w[1].2)));
        }
    }

    let mut tensors = BTreeMap::new();
    for r in table {
        if r.dtype != "f32" {
            return Err(Error::Format(format!("tensor `{}` has dtype {}", r.name, r.dtype)));
        }
        let n: usize = r.shape.iter().product();
        if r.length != 4 * n as u64 {
            return Err(Error::ShapeConflict {
                tensor: r.name,
                detail: format!("shape {:?} needs {} bytes, table says {}", r.shape, 4 * n, r.length),
            });
        }
        let end = r.offset.checked_add(r.length).filter(|&e| e <= payload.len() as u64);
        let Some(end) = end else {
            return Err(Error::Format(format!("tensor `{}` lies outside the payload", r.name)));
        };
        let raw = &payload[r.offset as usize..end as usize];
        if crc32fast::hash(raw) != r.crc32 {
            return Err(Error::Checksum { tensor: r.name });
        }
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        if tensors.contains_key(&r.name) {
            return Err(Error::Format(format!("duplicate tensor `{}`", r.name)));
        }
        tensors.insert(r.name, Tensor { shape: r.shape, data });
    }
    Ok((manifest, tensors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<u8> {
        let a = Tensor::new(vec![2], vec![1.0, -2.5]).unwrap();
        let b = Tensor::new(vec![1, 3], vec![0.0, 3.0, f32::MIN_POSITIVE]).unwrap();
        encode(b"TEST", Map::new(), [("a", &a), ("b", &b)])
    }

    #[test]
    fn round_trip() {
        let (m, t) = decode(b"TEST", &sample()).unwrap();
        assert!(m.contains_key("format_version"));
        assert_eq!(t["a"].data, vec![1.0, -2.5]);
        assert_eq!(t["b"].shape, vec![1, 3]);
    }

    #[test]
    fn wrong_magic_and_truncation() {
        assert!(matches!(decode(b"XXXX", &sample()), Err(Error::Format(_))));
        let bytes = sample();
        assert!(decode(b"TEST", &bytes[..bytes.len() - 1]).is_err());
    }
}
