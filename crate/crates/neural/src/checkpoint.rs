//! Binary checkpoints: magic, version, config JSON, then every tensor as
//! little-endian `f32` in declaration order.

use std::path::Path;

use crate::config::ModelConfig;
use crate::error::{NeuralError, Result};
use crate::model::Model;
use crate::params::ParamStore;
use crate::tensor::Tensor;

pub const MAGIC: &[u8; 8] = b"T2VMODEL";
pub const VERSION: u32 = 1;

pub fn to_bytes(model: &Model<f32>) -> Vec<u8> {
    let config = serde_json::to_vec(model.config()).expect("config serializes");
    let mut out = Vec::with_capacity(24 + config.len() + 4 * model.params().scalar_count());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(config.len() as u64).to_le_bytes());
    out.extend_from_slice(&config);
    for t in model.params().tensors() {
        for x in &t.data {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

fn take<'a>(bytes: &mut &'a [u8], n: usize, what: &str) -> Result<&'a [u8]> {
    if bytes.len() < n {
        return Err(NeuralError::Checkpoint(format!("truncated in {what}")));
    }
    let (head, rest) = bytes.split_at(n);
    *bytes = rest;
    Ok(head)
}

pub fn from_bytes(mut bytes: &[u8]) -> Result<Model<f32>> {
    let b = &mut bytes;
    if take(b, 8, "magic")? != MAGIC {
        return Err(NeuralError::Checkpoint("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(b, 4, "version")?.try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(NeuralError::Checkpoint(format!("unsupported version {version}")));
    }
    let len = u64::from_le_bytes(take(b, 8, "header length")?.try_into().expect("8 bytes"));
    let len = usize::try_from(len).map_err(|_| NeuralError::Checkpoint("header too long".into()))?;
    let config: ModelConfig = serde_json::from_slice(take(b, len, "config")?)
        .map_err(|e| NeuralError::Checkpoint(format!("config: {e}")))?;
    // A fresh model gives the layout; its values are then overwritten.
    let template = Model::<f32>::new(config.clone())?;
    let mut params = ParamStore::default();
    for (name, t) in template.params().names().iter().zip(template.params().tensors()) {
        let raw = take(b, 4 * t.len(), name)?;
        let data = raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
        params.push(name.clone(), Tensor::from_vec(t.rows, t.cols, data));
    }
    if !b.is_empty() {
        return Err(NeuralError::Checkpoint(format!("{} trailing bytes", b.len())));
    }
    Model::from_params(config, params)
}

pub fn save(model: &Model<f32>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_bytes(model))
        .map_err(|e| NeuralError::Io { path: path.display().to_string(), message: e.to_string() })
}

pub fn load(path: impl AsRef<Path>) -> Result<Model<f32>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)
        .map_err(|e| NeuralError::Io { path: path.display().to_string(), message: e.to_string() })?;
    from_bytes(&bytes)
}
