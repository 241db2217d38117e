use serde::{Deserialize, Serialize};
use t2v_core::ngram::{Lexicon, LexiconConfig, LexiconEntry};

use crate::error::{NeuralError, Result};

/// How n-gram outputs covering one character are combined before injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combiner {
    #[default]
    Sum,
    Mean,
}

/// Everything that determines the parameter set. The output vocabulary and
/// the n-gram lexicon are part of it, so a checkpoint is self-contained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub d_model: usize,
    pub n_layers: usize,
    pub n_heads: usize,
    pub d_ff: usize,
    pub d_ngram: usize,
    pub d_lstm: usize,
    /// Hash buckets for question characters and schema identifiers.
    pub input_buckets: usize,
    pub max_len: usize,
    pub max_decode_len: usize,
    pub vocab: Vec<String>,
    pub lexicon_max_n: usize,
    pub lexicon: Vec<LexiconEntry>,
    #[serde(default)]
    pub combiner: Combiner,
    /// When false the n-gram branch is skipped entirely.
    #[serde(default = "yes")]
    pub inject: bool,
    pub seed: u64,
}

fn yes() -> bool {
    true
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("d_model", self.d_model),
            ("n_layers", self.n_layers),
            ("n_heads", self.n_heads),
            ("d_ff", self.d_ff),
            ("d_ngram", self.d_ngram),
            ("d_lstm", self.d_lstm),
            ("input_buckets", self.input_buckets),
            ("max_len", self.max_len),
            ("max_decode_len", self.max_decode_len),
        ];
        for (name, v) in dims {
            if v == 0 {
                return Err(NeuralError::Config(format!("{name} must be at least 1")));
            }
        }
        if !self.d_model.is_multiple_of(self.n_heads) {
            return Err(NeuralError::Config(format!(
                "d_model {} is not divisible by n_heads {}",
                self.d_model, self.n_heads
            )));
        }
        if !self.d_ngram.is_multiple_of(self.n_heads) {
            return Err(NeuralError::Config(format!(
                "d_ngram {} is not divisible by n_heads {}",
                self.d_ngram, self.n_heads
            )));
        }
        for special in [crate::vocab::BOS, crate::vocab::EOS] {
            if !self.vocab.iter().any(|w| w == special) {
                return Err(NeuralError::Config(format!("vocab lacks {special}")));
            }
        }
        Ok(())
    }

    pub fn lexicon(&self) -> Lexicon {
        Lexicon::from_entries(self.lexicon_max_n, 1, self.lexicon.clone())
    }
}

/// Training run settings; the model dimensions mirror [`ModelConfig`] and
/// the vocabulary and lexicon are derived from the corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub d_model: usize,
    pub n_layers: usize,
    pub n_heads: usize,
    pub d_ff: usize,
    pub d_ngram: usize,
    pub d_lstm: usize,
    pub input_buckets: usize,
    pub max_len: usize,
    pub max_decode_len: usize,
    pub combiner: Combiner,
    pub inject: bool,
    pub lexicon: LexiconConfig,
    pub epochs: usize,
    pub learning_rate: f32,
    pub clip_norm: f32,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            d_model: 32,
            n_layers: 2,
            n_heads: 2,
            d_ff: 64,
            d_ngram: 16,
            d_lstm: 64,
            input_buckets: 2048,
            max_len: 96,
            max_decode_len: 48,
            combiner: Combiner::Sum,
            inject: true,
            lexicon: LexiconConfig { max_n: 4, min_freq: 3, max_entries: Some(2000) },
            epochs: 200,
            learning_rate: 0.05,
            clip_norm: 5.0,
            seed: 1,
        }
    }
}

impl TrainConfig {
    pub fn model_config(&self, vocab: Vec<String>, lexicon: &Lexicon) -> ModelConfig {
        ModelConfig {
            d_model: self.d_model,
            n_layers: self.n_layers,
            n_heads: self.n_heads,
            d_ff: self.d_ff,
            d_ngram: self.d_ngram,
            d_lstm: self.d_lstm,
            input_buckets: self.input_buckets,
            max_len: self.max_len,
            max_decode_len: self.max_decode_len,
            vocab,
            lexicon_max_n: lexicon.max_n,
            lexicon: lexicon.entries().to_vec(),
            combiner: self.combiner,
            inject: self.inject,
            seed: self.seed,
        }
    }
}
