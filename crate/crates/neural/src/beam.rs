//! Beam search decoding and batch prediction.

use serde::{Deserialize, Serialize};
use t2v_core::dataset::{DatabaseSchema, Sample, SchemaSet};
use t2v_core::metrics::PredictionRecord;
use t2v_core::ngram::match_ngrams;
use t2v_core::vql::{canonicalize, parse_vql, unparse_vql};
use t2v_core::Exec;

use crate::error::{NeuralError, Result};
use crate::input::serialize_input;
use crate::model::{DecoderState, Model};
use crate::tensor::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub vql: String,
    /// Log-probability divided by the number of emitted tokens.
    pub score: f64,
    pub log_prob: f64,
    /// False only for the fallback returned when nothing finished.
    pub finished: bool,
    /// Parses and resolves against the schema.
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamResult {
    pub candidates: Vec<Candidate>,
    /// No hypothesis finished within the decode limit.
    pub empty_beam: bool,
}

struct Hyp<F> {
    tokens: Vec<usize>,
    log_prob: f64,
    state: DecoderState<F>,
}

/// Parseable text is respelled through the unparser; validity also needs
/// the query to resolve against the schema.
fn finish_text(text: String, schema: &DatabaseSchema) -> (String, bool) {
    match parse_vql(&text) {
        Ok(q) => (unparse_vql(&q), canonicalize(&q, schema).is_ok()),
        Err(_) => (text, false),
    }
}

impl<F: Scalar> Model<F> {
    /// One beam run of `width`; finished hypotheses ranked by
    /// length-normalized log-probability, first `k` returned.
    pub fn beam_search(&self, question: &str, schema: &DatabaseSchema, width: usize, k: usize) -> Result<BeamResult> {
        if width == 0 || k == 0 || k > width {
            return Err(NeuralError::BeamArgs { width, k });
        }
        let input = serialize_input(question, schema, self.config())?;
        let lattice = match_ngrams(question, self.lexicon());
        let h = self.encode(&input, &lattice)?;
        let state = self.init_decoder(&h)?;
        let mem = self.memory(h, &input.pointer_map)?;
        let (bos, eos) = (self.vocab().bos(), self.vocab().eos());

        let mut live = vec![Hyp { tokens: Vec::new(), log_prob: 0.0, state }];
        let mut finished: Vec<Hyp<F>> = Vec::new();
        for _ in 0..self.config().max_decode_len {
            let mut expansions: Vec<(f64, usize, usize, DecoderState<F>)> = Vec::new();
            for (hi, hyp) in live.iter().enumerate() {
                let prev = hyp.tokens.last().copied().unwrap_or(bos);
                let (logp, _, next) = self.step_log_probs(&hyp.state, &mem, prev)?;
                let mut ranked: Vec<(usize, f64)> =
                    logp.into_iter().enumerate().filter(|(tok, _)| *tok != bos).collect();
                ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                for (tok, lp) in ranked.into_iter().take(width) {
                    expansions.push((hyp.log_prob + lp, hi, tok, next.clone()));
                }
            }
            expansions.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            expansions.truncate(width);
            let mut next_live = Vec::with_capacity(width);
            for (lp, hi, tok, st) in expansions {
                let mut tokens = live[hi].tokens.clone();
                tokens.push(tok);
                let hyp = Hyp { tokens, log_prob: lp, state: st };
                if tok == eos {
                    finished.push(hyp);
                } else {
                    next_live.push(hyp);
                }
            }
            live = next_live;
            if live.is_empty() {
                break;
            }
        }

        let empty_beam = finished.is_empty();
        let pool = if empty_beam { live } else { finished };
        let mut cands: Vec<Candidate> = pool
            .into_iter()
            .map(|h| {
                let (vql, valid) = finish_text(self.vocab().decode_targets(&h.tokens, &input.pointer_map), schema);
                Candidate {
                    valid,
                    score: h.log_prob / h.tokens.len().max(1) as f64,
                    log_prob: h.log_prob,
                    finished: !empty_beam,
                    vql,
                }
            })
            .collect();
        cands.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.vql.cmp(&b.vql)));
        cands.truncate(if empty_beam { 1 } else { k });
        Ok(BeamResult { candidates: cands, empty_beam })
    }

    pub fn greedy(&self, question: &str, schema: &DatabaseSchema) -> Result<Candidate> {
        let mut r = self.beam_search(question, schema, 1, 1)?;
        Ok(r.candidates.remove(0))
    }
}

/// Ranked candidates for every sample. A sample whose input cannot be
/// serialized gets a single empty candidate, which never matches.
pub fn predict_samples(
    model: &Model<f32>,
    samples: &[Sample],
    schemas: &SchemaSet,
    width: usize,
    k: usize,
    exec: Exec,
) -> Result<Vec<PredictionRecord>> {
    if width == 0 || k == 0 || k > width {
        return Err(NeuralError::BeamArgs { width, k });
    }
    exec.map(samples, |s| {
        let schema = schemas.get(&s.db_id).ok_or_else(|| NeuralError::UnknownDatabase(s.db_id.clone()))?;
        let candidates = match model.beam_search(&s.question_zh, schema, width, k) {
            Ok(r) => r.candidates.into_iter().map(|c| c.vql).collect(),
            Err(NeuralError::Length { .. }) => vec![String::new()],
            Err(e) => return Err(e),
        };
        Ok(PredictionRecord { id: s.id.clone(), candidates })
    })
    .into_iter()
    .collect()
}
