//! Teacher-forced training with plain gradient descent.

use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use t2v_core::dataset::{Sample, SchemaSet};
use t2v_core::ngram::{build_lexicon, match_ngrams, NgramLattice};
use t2v_core::vql::{canonicalize, parse_vql, unparse_vql, VqlQuery};

use crate::config::{ModelConfig, TrainConfig};
use crate::error::{NeuralError, Result};
use crate::input::{serialize_input, SerializedInput};
use crate::model::Model;
use crate::vocab::Vocab;

/// A sample turned into model inputs and decoder targets.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub id: String,
    pub db_id: String,
    pub input: SerializedInput,
    pub lattice: NgramLattice,
    pub targets: Vec<usize>,
    pub gold: VqlQuery,
}

fn gold_query(s: &Sample, schemas: &SchemaSet) -> Result<VqlQuery> {
    let schema = schemas.get(&s.db_id).ok_or_else(|| NeuralError::UnknownDatabase(s.db_id.clone()))?;
    let bad = |message: String| NeuralError::BadGold { sample: s.id.clone(), message };
    let q = parse_vql(&s.vql).map_err(|e| bad(e.to_string()))?;
    canonicalize(&q, schema).map_err(|e| bad(e.to_string()))
}

/// Model config for a corpus: the lexicon comes from the questions and the
/// literal vocabulary from the canonical gold queries.
pub fn model_config_for(samples: &[Sample], schemas: &SchemaSet, cfg: &TrainConfig) -> Result<ModelConfig> {
    let questions: Vec<&str> = samples.iter().map(|s| s.question_zh.as_str()).collect();
    let lexicon = build_lexicon(&questions, &cfg.lexicon).map_err(|e| NeuralError::Config(e.to_string()))?;
    let texts = samples
        .iter()
        .map(|s| gold_query(s, schemas).map(|q| unparse_vql(&q)))
        .collect::<Result<Vec<_>>>()?;
    let vocab = Vocab::build(texts.iter().map(String::as_str)).map_err(|e| NeuralError::Config(e.to_string()))?;
    let config = cfg.model_config(vocab.words().to_vec(), &lexicon);
    config.validate()?;
    Ok(config)
}

pub fn prepare<F: crate::tensor::Scalar>(
    model: &Model<F>,
    samples: &[Sample],
    schemas: &SchemaSet,
) -> Result<Vec<Prepared>> {
    samples
        .iter()
        .map(|s| {
            let gold = gold_query(s, schemas)?;
            let schema = schemas.get(&s.db_id).expect("checked by gold_query");
            let input = serialize_input(&s.question_zh, schema, model.config())?;
            let lattice = match_ngrams(&s.question_zh, model.lexicon());
            let targets = model
                .vocab()
                .encode_targets(&unparse_vql(&gold), &input.pointer_map)
                .map_err(|token| NeuralError::Oov { sample: s.id.clone(), token })?;
            Ok(Prepared { id: s.id.clone(), db_id: s.db_id.clone(), input, lattice, targets, gold })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainReport {
    /// Mean per-token loss of each epoch.
    pub epoch_losses: Vec<f64>,
    pub steps: usize,
}

impl TrainReport {
    pub fn final_loss(&self) -> Option<f64> {
        self.epoch_losses.last().copied()
    }
}

/// One gradient step; returns the gradient norm before clipping.
pub fn sgd_step(model: &mut Model<f32>, grads: &[crate::tensor::Tensor<f32>], lr: f32, clip: f32) -> f32 {
    let norm = grads.iter().map(|g| g.sq_norm()).sum::<f32>().sqrt();
    let scale = if norm > clip { clip / norm } else { 1.0 };
    let step = lr * scale;
    let params = model.params_mut();
    for (i, g) in grads.iter().enumerate() {
        for (p, d) in params.get_mut(i).data.iter_mut().zip(&g.data) {
            *p -= step * d;
        }
    }
    norm
}

/// Train from scratch. `on_epoch` sees the epoch index, its mean loss and
/// the current model, and may stop training early.
pub fn train_with(
    samples: &[Sample],
    schemas: &SchemaSet,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(usize, f64, &Model<f32>) -> ControlFlow<()>,
) -> Result<(Model<f32>, TrainReport)> {
    let config = model_config_for(samples, schemas, cfg)?;
    let mut model = Model::<f32>::new(config)?;
    let data = prepare(&model, samples, schemas)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut report = TrainReport::default();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0f64;
        for &i in &order {
            let p = &data[i];
            let (loss, grads) = model.loss_and_grads(&p.input, &p.lattice, &p.targets)?;
            if !loss.is_finite() {
                return Err(NeuralError::NonFinite { what: "loss", step: report.steps });
            }
            let norm = sgd_step(&mut model, &grads, cfg.learning_rate, cfg.clip_norm);
            if !norm.is_finite() {
                return Err(NeuralError::NonFinite { what: "gradient", step: report.steps });
            }
            total += f64::from(loss);
            report.steps += 1;
        }
        let mean = total / data.len().max(1) as f64;
        report.epoch_losses.push(mean);
        if on_epoch(epoch, mean, &model).is_break() {
            break;
        }
    }
    Ok((model, report))
}

pub fn train(samples: &[Sample], schemas: &SchemaSet, cfg: &TrainConfig) -> Result<(Model<f32>, TrainReport)> {
    train_with(samples, schemas, cfg, |_, _, _| ControlFlow::Continue(()))
}
