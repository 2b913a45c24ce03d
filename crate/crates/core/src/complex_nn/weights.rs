use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use crate::error::{Error, Result};

/// A named real-valued tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub shape: Vec<usize>,
    pub data: Vec<f32>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(Error::LengthMismatch {
                what: "tensor data",
                expected: n,
                got: data.len(),
            });
        }
        Ok(Tensor { shape, data })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Tensors keyed by canonical layer path, e.g. `encoder.0.conv.real.weight`.
///
/// Path grammar: `<block>.<index>.<sub>.<part>.<tensor>` for encoder, decoder,
/// pathway and LSTM entries, `<block>.<part>.<tensor>` for the dense
/// bottleneck, and `head.linear.<part>.<tensor>`; `<part>` is `real` or `imag`.
#[derive(Debug, Default)]
pub struct WeightStore {
    tensors: BTreeMap<String, Tensor>,
    used: Mutex<BTreeSet<String>>,
}

impl Clone for WeightStore {
    fn clone(&self) -> Self {
        WeightStore {
            tensors: self.tensors.clone(),
            used: Mutex::new(BTreeSet::new()),
        }
    }
}

impl PartialEq for WeightStore {
    fn eq(&self, other: &Self) -> bool {
        self.tensors == other.tensors
    }
}

impl WeightStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, path: impl Into<String>, tensor: Tensor) {
        self.tensors.insert(path.into(), tensor);
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Tensor)> {
        self.tensors.iter()
    }

    pub fn get(&self, path: &str) -> Option<&Tensor> {
        self.tensors.get(path)
    }

    pub fn get_mut(&mut self, path: &str) -> Option<&mut Tensor> {
        self.tensors.get_mut(path)
    }

    /// Fetches `path`, checking its shape, and marks it as referenced.
    pub fn fetch(&self, path: &str, shape: &[usize]) -> Result<Vec<f32>> {
        let t = self
            .tensors
            .get(path)
            .ok_or_else(|| Error::MissingTensor(path.to_string()))?;
        if t.shape != shape {
            return Err(Error::shape(path, shape, &t.shape));
        }
        self.used
            .lock()
            .expect("weight store lock poisoned")
            .insert(path.to_string());
        Ok(t.data.clone())
    }

    /// Paths present in the store but never fetched.
    pub fn unreferenced(&self) -> Vec<String> {
        let used = self.used.lock().expect("weight store lock poisoned");
        self.tensors
            .keys()
            .filter(|k| !used.contains(*k))
            .cloned()
            .collect()
    }

    pub fn total_scalars(&self) -> usize {
        self.tensors.values().map(Tensor::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fetch_checks_shape_and_tracks_use() {
        let mut store = WeightStore::new();
        store.insert("a.weight", Tensor::new(vec![2, 2], vec![1.0; 4]).unwrap());
        store.insert("b.weight", Tensor::new(vec![1], vec![0.0]).unwrap());
        assert!(matches!(
            store.fetch("a.weight", &[4]),
            Err(Error::Shape { .. })
        ));
        assert!(matches!(store.fetch("c", &[1]), Err(Error::MissingTensor(_))));
        store.fetch("a.weight", &[2, 2]).unwrap();
        assert_eq!(store.unreferenced(), vec!["b.weight".to_string()]);
    }
}
