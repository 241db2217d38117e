//! Encoder with layer-wise n-gram injection and a pointer-generator LSTM
//! decoder.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use t2v_core::ngram::{Lexicon, NgramLattice};

use crate::config::{Combiner, ModelConfig};
use crate::error::{NeuralError, Result};
use crate::input::{PointerSlot, SerializedInput, TokenKind};
use crate::params::ParamStore;
use crate::tape::{Tape, Var};
use crate::tensor::{Scalar, Tensor};
use crate::vocab::Vocab;

#[derive(Debug, Clone, Copy)]
enum Init {
    Zeros,
    Ones,
    Uniform(f64),
    Xavier,
    /// Zeros except the forget-gate quarter, which starts at one.
    ForgetBias,
}

#[derive(Debug, Clone)]
struct LayerIds {
    ln1_g: usize,
    ln1_b: usize,
    wq: usize,
    bq: usize,
    wk: usize,
    bk: usize,
    wv: usize,
    bv: usize,
    wo: usize,
    bo: usize,
    ln2_g: usize,
    ln2_b: usize,
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
}

#[derive(Debug, Clone)]
struct Ids {
    embed_in: usize,
    embed_kind: usize,
    embed_pos: usize,
    layers: Vec<LayerIds>,
    final_g: usize,
    final_b: usize,
    ngram_embed: usize,
    ngram_layers: Vec<LayerIds>,
    inject: Vec<usize>,
    init_h_w: usize,
    init_h_b: usize,
    init_c_w: usize,
    init_c_b: usize,
    dec_embed: usize,
    copy_w: usize,
    lstm_w: usize,
    lstm_b: usize,
    att_w: usize,
    out_w: usize,
    out_b: usize,
    vocab_w: usize,
    vocab_b: usize,
    gen_w: usize,
    gen_b: usize,
}

struct Layout {
    specs: Vec<(String, usize, usize, Init)>,
}

impl Layout {
    fn add(&mut self, name: String, rows: usize, cols: usize, init: Init) -> usize {
        self.specs.push((name, rows, cols, init));
        self.specs.len() - 1
    }

    fn layer(&mut self, prefix: &str, d: usize, d_ff: usize) -> LayerIds {
        let mut p = |n: &str, r, c, i| self.add(format!("{prefix}.{n}"), r, c, i);
        LayerIds {
            ln1_g: p("ln1.gain", 1, d, Init::Ones),
            ln1_b: p("ln1.bias", 1, d, Init::Zeros),
            wq: p("attn.wq", d, d, Init::Xavier),
            bq: p("attn.bq", 1, d, Init::Zeros),
            wk: p("attn.wk", d, d, Init::Xavier),
            bk: p("attn.bk", 1, d, Init::Zeros),
            wv: p("attn.wv", d, d, Init::Xavier),
            bv: p("attn.bv", 1, d, Init::Zeros),
            wo: p("attn.wo", d, d, Init::Xavier),
            bo: p("attn.bo", 1, d, Init::Zeros),
            ln2_g: p("ln2.gain", 1, d, Init::Ones),
            ln2_b: p("ln2.bias", 1, d, Init::Zeros),
            w1: p("ffn.w1", d, d_ff, Init::Xavier),
            b1: p("ffn.b1", 1, d_ff, Init::Zeros),
            w2: p("ffn.w2", d_ff, d, Init::Xavier),
            b2: p("ffn.b2", 1, d, Init::Zeros),
        }
    }
}

fn layout(c: &ModelConfig) -> (Layout, Ids) {
    let mut l = Layout { specs: Vec::new() };
    let (d, v, n_ng) = (c.d_model, c.vocab.len(), c.lexicon.len());
    let emb = Init::Uniform(1.0);
    let embed_in = l.add("encoder.embed.input".into(), c.input_buckets, d, emb);
    let embed_kind = l.add("encoder.embed.kind".into(), TokenKind::COUNT, d, emb);
    let embed_pos = l.add("encoder.embed.position".into(), c.max_len, d, emb);
    let layers = (0..c.n_layers).map(|i| l.layer(&format!("encoder.layer{i}"), d, c.d_ff)).collect();
    let final_g = l.add("encoder.final.gain".into(), 1, d, Init::Ones);
    let final_b = l.add("encoder.final.bias".into(), 1, d, Init::Zeros);
    let ngram_embed = l.add("ngram.embed".into(), n_ng, c.d_ngram, emb);
    let ngram_layers = (0..c.n_layers)
        .map(|i| l.layer(&format!("ngram.layer{i}"), c.d_ngram, c.d_ff))
        .collect();
    let inject = (0..c.n_layers)
        .map(|i| l.add(format!("ngram.inject{i}"), c.d_ngram, d, Init::Xavier))
        .collect();
    let h = c.d_lstm;
    let ids = Ids {
        embed_in,
        embed_kind,
        embed_pos,
        layers,
        final_g,
        final_b,
        ngram_embed,
        ngram_layers,
        inject,
        init_h_w: l.add("decoder.init.h.weight".into(), d, h, Init::Xavier),
        init_h_b: l.add("decoder.init.h.bias".into(), 1, h, Init::Zeros),
        init_c_w: l.add("decoder.init.c.weight".into(), d, h, Init::Xavier),
        init_c_b: l.add("decoder.init.c.bias".into(), 1, h, Init::Zeros),
        dec_embed: l.add("decoder.embed".into(), v, d, emb),
        copy_w: l.add("decoder.copy_embed".into(), d, d, Init::Xavier),
        lstm_w: l.add("decoder.lstm.weight".into(), 2 * d + h, 4 * h, Init::Xavier),
        lstm_b: l.add("decoder.lstm.bias".into(), 1, 4 * h, Init::ForgetBias),
        att_w: l.add("decoder.attention".into(), d, h, Init::Xavier),
        out_w: l.add("decoder.out.weight".into(), h + d, h, Init::Xavier),
        out_b: l.add("decoder.out.bias".into(), 1, h, Init::Zeros),
        vocab_w: l.add("decoder.vocab.weight".into(), h, v, Init::Xavier),
        vocab_b: l.add("decoder.vocab.bias".into(), 1, v, Init::Zeros),
        gen_w: l.add("decoder.gate.weight".into(), h + d, 1, Init::Xavier),
        gen_b: l.add("decoder.gate.bias".into(), 1, 1, Init::Zeros),
    };
    (l, ids)
}

/// Decoder recurrent state plus the previous attention context.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderState<F = f32> {
    pub h: Tensor<F>,
    pub c: Tensor<F>,
    pub context: Tensor<F>,
}

/// Probability over `vocab ∪ pointer slots`; pointer slot `s` is entry
/// `vocab_len + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    pub probs: Vec<f64>,
    pub p_gen: f64,
}

/// Encoder output with the attention keys precomputed.
#[derive(Debug, Clone)]
pub struct Memory<F = f32> {
    pub h: Tensor<F>,
    keys: Tensor<F>,
    slots: Vec<usize>,
}

struct MemVars {
    h: Var,
    keys: Var,
    slots: Vec<usize>,
}

struct StateVars {
    h: Var,
    c: Var,
    context: Var,
}

struct StepVars {
    log_gen: Var,
    log_copy: Var,
    log_vocab: Var,
    log_ptr: Var,
}

#[derive(Debug, Clone)]
pub struct Model<F = f32> {
    config: ModelConfig,
    params: ParamStore<F>,
    ids: Ids,
    vocab: Vocab,
    lexicon: Lexicon,
}

impl<F: Scalar> Model<F> {
    /// Fresh parameters drawn from a generator seeded with `config.seed`.
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let (layout, ids) = layout(&config);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut params = ParamStore::default();
        for (name, r, c, init) in layout.specs {
            let data: Vec<F> = match init {
                Init::Zeros => vec![F::zero(); r * c],
                Init::Ones => vec![F::one(); r * c],
                Init::Uniform(a) => (0..r * c).map(|_| F::of(rng.random_range(-a..a))).collect(),
                Init::Xavier => {
                    let a = (6.0 / (r + c) as f64).sqrt();
                    (0..r * c).map(|_| F::of(rng.random_range(-a..a))).collect()
                }
                Init::ForgetBias => {
                    let q = c / 4;
                    (0..c).map(|i| if (q..2 * q).contains(&i) { F::one() } else { F::zero() }).collect()
                }
            };
            params.push(name, Tensor::from_vec(r, c, data));
        }
        Ok(Self::assemble(config, params, ids))
    }

    /// Wrap existing parameters; names and shapes must match the layout the
    /// config implies.
    pub fn from_params(config: ModelConfig, params: ParamStore<F>) -> Result<Self> {
        config.validate()?;
        let (layout, ids) = layout(&config);
        if layout.specs.len() != params.len() {
            return Err(NeuralError::Shape(format!(
                "config implies {} tensors, got {}",
                layout.specs.len(),
                params.len()
            )));
        }
        for (i, (name, r, c, _)) in layout.specs.iter().enumerate() {
            if params.name(i) != name || params.get(i).shape() != [*r, *c] {
                return Err(NeuralError::Shape(format!(
                    "tensor {i}: expected {name} {r}x{c}, got {} {:?}",
                    params.name(i),
                    params.get(i).shape()
                )));
            }
        }
        Ok(Self::assemble(config, params, ids))
    }

    fn assemble(config: ModelConfig, params: ParamStore<F>, ids: Ids) -> Self {
        let vocab = Vocab::new(config.vocab.clone());
        let lexicon = config.lexicon();
        Model { config, params, ids, vocab, lexicon }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn params(&self) -> &ParamStore<F> {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamStore<F> {
        &mut self.params
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn cast<G: Scalar>(&self) -> Model<G> {
        Model {
            config: self.config.clone(),
            params: self.params.cast(),
            ids: self.ids.clone(),
            vocab: self.vocab.clone(),
            lexicon: self.lexicon.clone(),
        }
    }

    /// Index of the gate bias, exposed for tests that pin `p_gen`.
    pub fn gate_bias_param(&self) -> usize {
        self.ids.gen_b
    }

    fn check_input(&self, input: &SerializedInput, lattice: &NgramLattice) -> Result<()> {
        if input.tokens.is_empty() || input.tokens.len() > self.config.max_len {
            return Err(NeuralError::Shape(format!(
                "{} tokens for max_len {}",
                input.tokens.len(),
                self.config.max_len
            )));
        }
        if let Some(t) = input.tokens.iter().find(|t| t.embedding_id >= self.config.input_buckets) {
            return Err(NeuralError::Shape(format!("embedding id {} out of range", t.embedding_id)));
        }
        if lattice.chars.len() != input.question_len {
            return Err(NeuralError::Shape(format!(
                "lattice over {} chars, question has {}",
                lattice.chars.len(),
                input.question_len
            )));
        }
        for m in &lattice.matches {
            if m.len == 0 || m.start + m.len > input.question_len || m.id >= self.lexicon.len() {
                return Err(NeuralError::Shape(format!("n-gram match {m:?} out of range")));
            }
        }
        Ok(())
    }

    fn transformer_layer(&self, t: &mut Tape<F>, x: Var, l: &LayerIds) -> Var {
        let [n, d] = t.shape(x);
        let heads = self.config.n_heads;
        let dh = d / heads;
        let (g1, b1) = (t.param(l.ln1_g), t.param(l.ln1_b));
        let a = t.layer_norm(x, g1, b1);
        let (wq, bq, wk, bk, wv, bv) = (
            t.param(l.wq),
            t.param(l.bq),
            t.param(l.wk),
            t.param(l.bk),
            t.param(l.wv),
            t.param(l.bv),
        );
        let q = t.linear(a, wq, bq);
        let k = t.linear(a, wk, bk);
        let v = t.linear(a, wv, bv);
        let scale = F::of(1.0 / (dh as f64).sqrt());
        let mut outs = Vec::with_capacity(heads);
        for hd in 0..heads {
            let qh = t.slice_cols(q, hd * dh, dh);
            let kh = t.slice_cols(k, hd * dh, dh);
            let vh = t.slice_cols(v, hd * dh, dh);
            let s = t.matmul_t(qh, kh);
            let s = t.scale(s, scale);
            let p = t.softmax(s);
            outs.push(t.matmul(p, vh));
        }
        let o = if heads == 1 { outs[0] } else { t.concat_cols(outs) };
        let (wo, bo) = (t.param(l.wo), t.param(l.bo));
        let o = t.linear(o, wo, bo);
        let x = t.add(x, o);
        let (g2, b2) = (t.param(l.ln2_g), t.param(l.ln2_b));
        let f = t.layer_norm(x, g2, b2);
        let (w1, fb1, w2, fb2) = (t.param(l.w1), t.param(l.b1), t.param(l.w2), t.param(l.b2));
        let f = t.linear(f, w1, fb1);
        let f = t.gelu(f);
        let f = t.linear(f, w2, fb2);
        debug_assert_eq!(t.shape(f), [n, d]);
        t.add(x, f)
    }

    /// Encoder forward pass. `trace`, when given, receives the residual
    /// stream entering each layer (index 0 is the embedding).
    fn encode_on(
        &self,
        t: &mut Tape<F>,
        input: &SerializedInput,
        lattice: &NgramLattice,
        mut trace: Option<&mut Vec<Tensor<F>>>,
    ) -> Result<Var> {
        self.check_input(input, lattice)?;
        let n = input.tokens.len();
        let ids = &self.ids;
        let e_in = t.param(ids.embed_in);
        let e_kind = t.param(ids.embed_kind);
        let e_pos = t.param(ids.embed_pos);
        let x_in = t.gather(e_in, input.tokens.iter().map(|tk| tk.embedding_id).collect());
        let x_kind = t.gather(e_kind, input.tokens.iter().map(|tk| tk.kind.index()).collect());
        let x_pos = t.rows(e_pos, 0, n);
        let x = t.add(x_in, x_kind);
        let mut x = t.add(x, x_pos);

        let injecting = self.config.inject && !lattice.matches.is_empty();
        let mut g = None;
        // Row k of the expanded source adds n-gram `src[k]` at position `pos[k]`.
        let (mut src, mut pos, mut weight) = (Vec::new(), Vec::new(), Vec::new());
        if injecting {
            let e_ng = t.param(ids.ngram_embed);
            g = Some(t.gather(e_ng, lattice.matches.iter().map(|m| m.id).collect()));
            let mut cover = vec![0usize; input.question_len];
            for m in &lattice.matches {
                for c in &mut cover[m.start..m.start + m.len] {
                    *c += 1;
                }
            }
            for (k, m) in lattice.matches.iter().enumerate() {
                for i in m.start..m.start + m.len {
                    src.push(k);
                    pos.push(input.char_position(i));
                    weight.push(match self.config.combiner {
                        Combiner::Sum => 1.0,
                        Combiner::Mean => 1.0 / cover[i] as f64,
                    });
                }
            }
        }

        for (l, layer) in ids.layers.iter().enumerate() {
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(t.value(x).clone());
            }
            x = self.transformer_layer(t, x, layer);
            if let Some(gv) = g {
                let gv = self.transformer_layer(t, gv, &ids.ngram_layers[l]);
                g = Some(gv);
                let w = t.param(ids.inject[l]);
                let proj = t.matmul(gv, w);
                let mut rows = t.gather(proj, src.clone());
                if self.config.combiner == Combiner::Mean {
                    let d = self.config.d_model;
                    let mut wt = Tensor::zeros(weight.len(), d);
                    for (r, &wv) in weight.iter().enumerate() {
                        wt.row_mut(r).fill(F::of(wv));
                    }
                    let wt = t.constant(wt);
                    rows = t.mul(rows, wt);
                }
                x = t.scatter_add_rows(x, rows, pos.clone());
            }
        }
        if let Some(tr) = trace.as_mut() {
            tr.push(t.value(x).clone());
        }
        let (fg, fb) = (t.param(ids.final_g), t.param(ids.final_b));
        Ok(t.layer_norm(x, fg, fb))
    }

    fn memory_on(&self, t: &mut Tape<F>, h: Var, slots: &[PointerSlot]) -> Result<MemVars> {
        let [n, d] = t.shape(h);
        if d != self.config.d_model {
            return Err(NeuralError::Shape(format!("H width {d}, d_model {}", self.config.d_model)));
        }
        if let Some(s) = slots.iter().find(|s| s.position >= n) {
            return Err(NeuralError::Shape(format!("pointer slot at {} beyond {n} rows", s.position)));
        }
        let w = t.param(self.ids.att_w);
        let keys = t.matmul(h, w);
        Ok(MemVars { h, keys, slots: slots.iter().map(|s| s.position).collect() })
    }

    fn init_on(&self, t: &mut Tape<F>, h: Var) -> StateVars {
        let cls = t.rows(h, 0, 1);
        let (hw, hb, cw, cb) = (
            t.param(self.ids.init_h_w),
            t.param(self.ids.init_h_b),
            t.param(self.ids.init_c_w),
            t.param(self.ids.init_c_b),
        );
        let h0 = t.linear(cls, hw, hb);
        let c0 = t.linear(cls, cw, cb);
        let context = t.constant(Tensor::zeros(1, self.config.d_model));
        StateVars { h: h0, c: c0, context }
    }

    fn step_on(&self, t: &mut Tape<F>, mem: &MemVars, s: &StateVars, prev: usize) -> (StepVars, StateVars) {
        let ids = &self.ids;
        let hd = self.config.d_lstm;
        let v = self.vocab.len();
        let emb = if prev < v {
            let e = t.param(ids.dec_embed);
            t.gather(e, vec![prev])
        } else {
            let row = t.rows(mem.h, mem.slots[prev - v], 1);
            let w = t.param(ids.copy_w);
            t.matmul(row, w)
        };
        let x = t.concat_cols(vec![emb, s.context, s.h]);
        let (lw, lb) = (t.param(ids.lstm_w), t.param(ids.lstm_b));
        let gates = t.linear(x, lw, lb);
        let i = t.slice_cols(gates, 0, hd);
        let f = t.slice_cols(gates, hd, hd);
        let g = t.slice_cols(gates, 2 * hd, hd);
        let o = t.slice_cols(gates, 3 * hd, hd);
        let i = t.sigmoid(i);
        let f = t.sigmoid(f);
        let g = t.tanh(g);
        let o = t.sigmoid(o);
        let fc = t.mul(f, s.c);
        let ig = t.mul(i, g);
        let c = t.add(fc, ig);
        let tc = t.tanh(c);
        let h = t.mul(o, tc);

        let scores = t.matmul_t(h, mem.keys);
        let alpha = t.softmax(scores);
        let context = t.matmul(alpha, mem.h);
        let feat = t.concat_cols(vec![h, context]);
        let (ow, ob) = (t.param(ids.out_w), t.param(ids.out_b));
        let out = t.linear(feat, ow, ob);
        let out = t.tanh(out);
        let (vw, vb) = (t.param(ids.vocab_w), t.param(ids.vocab_b));
        let logits = t.linear(out, vw, vb);
        let log_vocab = t.log_softmax(logits);
        let ptr_scores = t.gather_cols(scores, mem.slots.clone());
        let log_ptr = t.log_softmax(ptr_scores);
        let (gw, gb) = (t.param(ids.gen_w), t.param(ids.gen_b));
        let z = t.linear(feat, gw, gb);
        let log_gen = t.log_sigmoid(z);
        let neg = t.scale(z, -F::one());
        let log_copy = t.log_sigmoid(neg);
        (StepVars { log_gen, log_copy, log_vocab, log_ptr }, StateVars { h, c, context })
    }

    /// Mean per-token negative log-likelihood of `targets` under teacher
    /// forcing.
    fn loss_on(
        &self,
        t: &mut Tape<F>,
        input: &SerializedInput,
        lattice: &NgramLattice,
        targets: &[usize],
    ) -> Result<Var> {
        let h = self.encode_on(t, input, lattice, None)?;
        let mem = self.memory_on(t, h, &input.pointer_map)?;
        let mut state = self.init_on(t, h);
        let v = self.vocab.len();
        let mut prev = self.vocab.bos();
        let mut terms = Vec::with_capacity(targets.len());
        for &y in targets {
            if y >= v + mem.slots.len() {
                return Err(NeuralError::Shape(format!("target {y} out of range")));
            }
            let (sv, next) = self.step_on(t, &mem, &state, prev);
            let term = if y < v {
                let p = t.pick(sv.log_vocab, 0, y);
                t.add(sv.log_gen, p)
            } else {
                let p = t.pick(sv.log_ptr, 0, y - v);
                t.add(sv.log_copy, p)
            };
            terms.push(term);
            state = next;
            prev = y;
        }
        let all = t.concat_cols(terms);
        let total = t.sum(all);
        Ok(t.scale(total, F::of(-1.0 / targets.len() as f64)))
    }

    /// Loss and parameter gradients for one training pair.
    pub fn loss_and_grads(
        &self,
        input: &SerializedInput,
        lattice: &NgramLattice,
        targets: &[usize],
    ) -> Result<(F, Vec<Tensor<F>>)> {
        let mut t = Tape::new(&self.params);
        let loss = self.loss_on(&mut t, input, lattice, targets)?;
        let value = t.value(loss).data[0];
        Ok((value, t.backward(loss)))
    }

    pub fn loss(&self, input: &SerializedInput, lattice: &NgramLattice, targets: &[usize]) -> Result<F> {
        let mut t = Tape::new(&self.params);
        let loss = self.loss_on(&mut t, input, lattice, targets)?;
        Ok(t.value(loss).data[0])
    }

    /// Encoder output `H` of shape `(tokens, d_model)`.
    pub fn encode(&self, input: &SerializedInput, lattice: &NgramLattice) -> Result<Tensor<F>> {
        let mut t = Tape::new(&self.params);
        let h = self.encode_on(&mut t, input, lattice, None)?;
        Ok(t.value(h).clone())
    }

    /// Encoder output plus the residual stream entering each layer and the
    /// final pre-normalization stream.
    pub fn encode_traced(
        &self,
        input: &SerializedInput,
        lattice: &NgramLattice,
    ) -> Result<(Tensor<F>, Vec<Tensor<F>>)> {
        let mut t = Tape::new(&self.params);
        let mut trace = Vec::new();
        let h = self.encode_on(&mut t, input, lattice, Some(&mut trace))?;
        Ok((t.value(h).clone(), trace))
    }

    pub fn memory(&self, h: Tensor<F>, slots: &[PointerSlot]) -> Result<Memory<F>> {
        let mut t = Tape::new(&self.params);
        let hv = t.constant(h);
        let m = self.memory_on(&mut t, hv, slots)?;
        Ok(Memory { h: t.value(hv).clone(), keys: t.value(m.keys).clone(), slots: m.slots })
    }

    pub fn init_decoder(&self, h: &Tensor<F>) -> Result<DecoderState<F>> {
        if h.rows == 0 || h.cols != self.config.d_model {
            return Err(NeuralError::Shape(format!(
                "H is {:?}, expected (n, {})",
                h.shape(),
                self.config.d_model
            )));
        }
        let mut t = Tape::new(&self.params);
        let hv = t.constant(h.clone());
        let s = self.init_on(&mut t, hv);
        Ok(DecoderState {
            h: t.value(s.h).clone(),
            c: t.value(s.c).clone(),
            context: t.value(s.context).clone(),
        })
    }

    /// Log-probabilities over `vocab ∪ slots` and the next state.
    pub fn step_log_probs(
        &self,
        state: &DecoderState<F>,
        mem: &Memory<F>,
        prev: usize,
    ) -> Result<(Vec<f64>, f64, DecoderState<F>)> {
        let v = self.vocab.len();
        if prev >= v + mem.slots.len() {
            return Err(NeuralError::Shape(format!("previous token {prev} out of range")));
        }
        let hd = self.config.d_lstm;
        if state.h.shape() != [1, hd] || state.c.shape() != [1, hd] {
            return Err(NeuralError::Shape(format!("decoder state is not 1x{hd}")));
        }
        if state.context.shape() != [1, self.config.d_model] {
            return Err(NeuralError::Shape("decoder context width".into()));
        }
        let mut t = Tape::new(&self.params);
        let mv = MemVars {
            h: t.constant(mem.h.clone()),
            keys: t.constant(mem.keys.clone()),
            slots: mem.slots.clone(),
        };
        let sv = StateVars {
            h: t.constant(state.h.clone()),
            c: t.constant(state.c.clone()),
            context: t.constant(state.context.clone()),
        };
        let (step, next) = self.step_on(&mut t, &mv, &sv, prev);
        let lg = t.value(step.log_gen).data[0].as_f64();
        let lc = t.value(step.log_copy).data[0].as_f64();
        let mut out: Vec<f64> = t.value(step.log_vocab).data.iter().map(|x| lg + x.as_f64()).collect();
        out.extend(t.value(step.log_ptr).data.iter().map(|x| lc + x.as_f64()));
        let next = DecoderState {
            h: t.value(next.h).clone(),
            c: t.value(next.c).clone(),
            context: t.value(next.context).clone(),
        };
        Ok((out, lg.exp(), next))
    }

    /// One decoder step from raw `H`.
    pub fn decode_step(
        &self,
        state: &DecoderState<F>,
        h: &Tensor<F>,
        pointer_map: &[PointerSlot],
        prev: usize,
    ) -> Result<(StepDistribution, DecoderState<F>)> {
        let mem = self.memory(h.clone(), pointer_map)?;
        let (logp, p_gen, next) = self.step_log_probs(state, &mem, prev)?;
        let probs = logp.into_iter().map(f64::exp).collect();
        Ok((StepDistribution { probs, p_gen }, next))
    }
}
