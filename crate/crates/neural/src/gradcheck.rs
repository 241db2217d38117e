//! Analytic gradients against central finite differences in `f64`.

use serde::{Deserialize, Serialize};
use t2v_core::dataset::{ColumnDef, DType, DatabaseSchema, TableDef};
use t2v_core::ngram::{LexiconEntry, NgramLattice, NgramMatch};

use crate::config::{Combiner, ModelConfig};
use crate::error::Result;
use crate::input::{serialize_input, SerializedInput};
use crate::model::Model;
use crate::vocab::{BOS, EOS};

pub const FD_EPSILON: f64 = 1e-3;
/// Tensors whose gradients are all below this are compared absolutely.
const SCALE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorCheck {
    pub name: String,
    pub max_abs_error: f64,
    /// `max |analytic - numeric|` over the larger of the two gradients'
    /// max magnitudes.
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradReport {
    pub tolerance: f64,
    pub tensors: Vec<TensorCheck>,
    pub passed: bool,
}

impl GradReport {
    pub fn worst(&self) -> Option<&TensorCheck> {
        self.tensors.iter().max_by(|a, b| a.max_rel_error.total_cmp(&b.max_rel_error))
    }
}

/// All dimensions at most 8, six input tokens, five decode steps.
pub fn tiny_config(seed: u64) -> ModelConfig {
    ModelConfig {
        d_model: 8,
        n_layers: 2,
        n_heads: 2,
        d_ff: 8,
        d_ngram: 4,
        d_lstm: 8,
        input_buckets: 8,
        max_len: 6,
        max_decode_len: 6,
        vocab: [BOS, EOS, "Visualize", "BAR", "SELECT"].map(String::from).to_vec(),
        lexicon_max_n: 2,
        lexicon: vec![
            LexiconEntry { ngram: "电影".into(), freq: 2 },
            LexiconEntry { ngram: "影".into(), freq: 1 },
        ],
        combiner: Combiner::Sum,
        inject: true,
        seed,
    }
}

/// One-character question over one table with one column, with a single
/// n-gram covering the character, and a target that mixes vocabulary words
/// and both pointer slots.
pub fn tiny_example(config: &ModelConfig) -> Result<(SerializedInput, NgramLattice, Vec<usize>)> {
    let schema = DatabaseSchema {
        db_id: "tiny".into(),
        tables: vec![TableDef {
            name: "t".into(),
            columns: vec![ColumnDef { name: "c".into(), dtype: DType::Number }],
            primary_key: None,
            foreign_keys: vec![],
        }],
    };
    let input = serialize_input("影", &schema, config)?;
    let lattice = NgramLattice { chars: vec!['影'], matches: vec![NgramMatch { start: 0, len: 1, id: 1 }] };
    let v = config.vocab.len();
    let id = |w: &str| config.vocab.iter().position(|x| x == w).expect("tiny vocab word");
    let targets = vec![id("Visualize"), v + 1, id("BAR"), v, id(EOS)];
    Ok((input, lattice, targets))
}

/// Check every parameter tensor of `config` on [`tiny_example`].
pub fn grad_check(config: &ModelConfig, tolerance: f64) -> Result<GradReport> {
    let (input, lattice, targets) = tiny_example(config)?;
    let mut model = Model::<f64>::new(config.clone())?;
    let (_, analytic) = model.loss_and_grads(&input, &lattice, &targets)?;
    let mut tensors = Vec::with_capacity(analytic.len());
    for (pi, grad) in analytic.iter().enumerate() {
        let mut max_abs: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for j in 0..grad.len() {
            let orig = model.params().get(pi).data[j];
            model.params_mut().get_mut(pi).data[j] = orig + FD_EPSILON;
            let up = model.loss(&input, &lattice, &targets)?;
            model.params_mut().get_mut(pi).data[j] = orig - FD_EPSILON;
            let down = model.loss(&input, &lattice, &targets)?;
            model.params_mut().get_mut(pi).data[j] = orig;
            let numeric = (up - down) / (2.0 * FD_EPSILON);
            let a = grad.data[j];
            max_abs = max_abs.max((a - numeric).abs());
            scale = scale.max(a.abs()).max(numeric.abs());
        }
        tensors.push(TensorCheck {
            name: model.params().name(pi).to_string(),
            max_abs_error: max_abs,
            max_rel_error: max_abs / scale.max(SCALE_FLOOR),
        });
    }
    let passed = tensors.iter().all(|t| t.max_rel_error < tolerance);
    Ok(GradReport { tolerance, tensors, passed })
}
