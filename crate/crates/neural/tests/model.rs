use t2v_core::dataset::{ColumnDef, DType, DatabaseSchema, TableDef};
use t2v_core::ngram::{match_ngrams, LexiconEntry, NgramLattice};
use t2v_neural::input::TokenKind;
use t2v_neural::vocab::{BOS, EOS};
use t2v_neural::{serialize_input, Combiner, Model, ModelConfig, NeuralError};

fn schema() -> DatabaseSchema {
    let col = |name: &str, dtype| ColumnDef { name: name.into(), dtype };
    DatabaseSchema {
        db_id: "cinema".into(),
        tables: vec![
            TableDef {
                name: "film".into(),
                columns: vec![col("title", DType::Text), col("gross", DType::Number)],
                primary_key: None,
                foreign_keys: vec![],
            },
            TableDef {
                name: "studio".into(),
                columns: vec![col("name", DType::Text)],
                primary_key: None,
                foreign_keys: vec![],
            },
        ],
    }
}

fn one_table() -> DatabaseSchema {
    let mut s = schema();
    s.tables.truncate(1);
    s
}

fn config(d_model: usize, n_layers: usize, n_heads: usize, lexicon: &[&str], seed: u64) -> ModelConfig {
    ModelConfig {
        d_model,
        n_layers,
        n_heads,
        d_ff: 2 * d_model,
        d_ngram: 2 * n_heads,
        d_lstm: d_model + 4,
        input_buckets: 64,
        max_len: 40,
        max_decode_len: 12,
        vocab: [BOS, EOS, "Visualize", "BAR", "SELECT", "FROM"].map(String::from).to_vec(),
        lexicon_max_n: 4,
        lexicon: lexicon.iter().map(|g| LexiconEntry { ngram: g.to_string(), freq: 3 }).collect(),
        combiner: Combiner::Sum,
        inject: true,
        seed,
    }
}

fn param_index(model: &Model<f32>, name: &str) -> usize {
    model.params().names().iter().position(|n| n == name).unwrap()
}

#[test]
fn serialization_layout_counts_tokens_and_slots() {
    let input = serialize_input("票房高", &one_table(), &config(8, 1, 2, &[], 1)).unwrap();
    assert_eq!(input.len(), 10);
    assert_eq!(input.pointer_map.len(), 3);
    assert_eq!(input.question_len, 3);
    let kinds: Vec<TokenKind> = input.tokens.iter().map(|t| t.kind).collect();
    use TokenKind::*;
    assert_eq!(kinds, [Cls, QChar, QChar, QChar, Sep, Table, Sep, Column, Sep, Column]);
    let surfaces: Vec<String> = input.pointer_map.iter().map(|s| s.surface()).collect();
    assert_eq!(surfaces, ["film", "film.title", "film.gross"]);
    for slot in &input.pointer_map {
        let tok = &input.tokens[slot.position];
        assert_eq!(tok.surface, slot.column.as_deref().unwrap_or(&slot.table));
    }
}

#[test]
fn serialization_covers_every_schema_element_in_order() {
    let input = serialize_input("各工作室的影片", &schema(), &config(8, 1, 2, &[], 1)).unwrap();
    let surfaces: Vec<String> = input.pointer_map.iter().map(|s| s.surface()).collect();
    assert_eq!(surfaces, ["film", "film.title", "film.gross", "studio", "studio.name"]);
    let positions: Vec<usize> = input.pointer_map.iter().map(|s| s.position).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(input.len(), 1 + 7 + 2 * 5);
}

#[test]
fn serialization_is_deterministic_and_bounded() {
    let c = config(8, 1, 2, &[], 1);
    let a = serialize_input("票房最高的电影", &schema(), &c).unwrap();
    let b = serialize_input("票房最高的电影", &schema(), &c).unwrap();
    assert_eq!(a, b);
    assert!(a.tokens.iter().all(|t| t.embedding_id < c.input_buckets));
    let long = "很".repeat(c.max_len);
    assert!(matches!(serialize_input(&long, &schema(), &c), Err(NeuralError::Length { .. })));
    assert!(matches!(serialize_input("  ", &schema(), &c), Err(NeuralError::EmptyQuestion)));
}

#[test]
fn encoder_output_shape_matches_config() {
    for (d, layers, heads, seed) in [(8, 1, 1, 3), (12, 2, 3, 4), (16, 3, 4, 5)] {
        let c = config(d, layers, heads, &["电影"], seed);
        let model = Model::<f32>::new(c.clone()).unwrap();
        let input = serialize_input("电影票房", &schema(), &c).unwrap();
        let lattice = match_ngrams("电影票房", model.lexicon());
        let (h, trace) = model.encode_traced(&input, &lattice).unwrap();
        assert_eq!(h.shape(), [input.len(), d]);
        assert_eq!(trace.len(), layers + 1);
        assert!(trace.iter().all(|t| t.shape() == [input.len(), d]));
        assert!(h.data.iter().all(|x| x.is_finite()));
        assert_eq!(model.encode(&input, &lattice).unwrap(), h);
    }
}

#[test]
fn empty_lexicon_encoder_is_bit_identical_to_injection_free() {
    let with = config(12, 2, 2, &[], 9);
    let mut without = with.clone();
    without.inject = false;
    let a = Model::<f32>::new(with.clone()).unwrap();
    let b = Model::<f32>::from_params(without, a.params().clone()).unwrap();
    for q in ["电影票房", "各工作室的影片数量", "x"] {
        let input = serialize_input(q, &schema(), &with).unwrap();
        let lattice = match_ngrams(q, a.lexicon());
        assert!(lattice.matches.is_empty());
        let (ha, ta) = a.encode_traced(&input, &lattice).unwrap();
        let (hb, tb) = b.encode_traced(&input, &lattice).unwrap();
        assert_eq!(ha.data.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), hb.data.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        assert_eq!(ta, tb);
    }
}

#[test]
fn injection_changes_only_covered_positions_before_layer_one() {
    let q = "各电影的票房";
    for combiner in [Combiner::Sum, Combiner::Mean] {
        let mut with = config(12, 2, 2, &["电影", "票房", "电"], 11);
        with.combiner = combiner;
        let mut without = with.clone();
        without.inject = false;
        let a = Model::<f32>::new(with.clone()).unwrap();
        let b = Model::<f32>::from_params(without, a.params().clone()).unwrap();
        let input = serialize_input(q, &schema(), &with).unwrap();
        let lattice = match_ngrams(q, a.lexicon());
        let mut covered = vec![false; input.len()];
        for m in &lattice.matches {
            for i in m.start..m.start + m.len {
                covered[input.char_position(i)] = true;
            }
        }
        assert_eq!(covered.iter().filter(|c| **c).count(), 4);
        let (_, ta) = a.encode_traced(&input, &lattice).unwrap();
        let (_, tb) = b.encode_traced(&input, &lattice).unwrap();
        assert_eq!(ta[0], tb[0]);
        for (pos, cov) in covered.iter().enumerate() {
            if *cov {
                assert_ne!(ta[1].row(pos), tb[1].row(pos), "position {pos} should change");
            } else {
                assert_eq!(ta[1].row(pos), tb[1].row(pos), "position {pos} should not change");
            }
        }
    }
}

#[test]
fn lattice_with_unknown_ngram_id_is_rejected() {
    let c = config(8, 1, 2, &["电影"], 1);
    let model = Model::<f32>::new(c.clone()).unwrap();
    let input = serialize_input("电影", &schema(), &c).unwrap();
    let lattice = NgramLattice {
        chars: vec!['电', '影'],
        matches: vec![t2v_core::ngram::NgramMatch { start: 0, len: 2, id: 7 }],
    };
    assert!(model.encode(&input, &lattice).is_err());
}

#[test]
fn step_distribution_sums_to_one() {
    let c = config(12, 2, 2, &["电影"], 5);
    let model = Model::<f32>::new(c.clone()).unwrap();
    let input = serialize_input("电影票房", &schema(), &c).unwrap();
    let lattice = match_ngrams("电影票房", model.lexicon());
    let h = model.encode(&input, &lattice).unwrap();
    let mut state = model.init_decoder(&h).unwrap();
    let v = model.vocab().len();
    let mut prev = model.vocab().bos();
    for step in 0..6 {
        let (dist, next) = model.decode_step(&state, &h, &input.pointer_map, prev).unwrap();
        assert_eq!(dist.probs.len(), v + input.pointer_map.len());
        let total: f64 = dist.probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-6, "step {step}: {total}");
        assert!((0.0..=1.0).contains(&dist.p_gen));
        let gen: f64 = dist.probs[..v].iter().sum();
        assert!((gen - dist.p_gen).abs() < 1e-6);
        state = next;
        prev = if step % 2 == 0 { v + step % input.pointer_map.len() } else { 2 };
    }
}

#[test]
fn gate_limits_select_vocabulary_or_pointer() {
    let c = config(12, 2, 2, &[], 6);
    let mut model = Model::<f32>::new(c.clone()).unwrap();
    let input = serialize_input("电影票房", &schema(), &c).unwrap();
    let lattice = match_ngrams("电影票房", model.lexicon());
    let v = model.vocab().len();
    let gate = model.gate_bias_param();

    model.params_mut().get_mut(gate).data[0] = 1e4;
    let h = model.encode(&input, &lattice).unwrap();
    let state = model.init_decoder(&h).unwrap();
    let (dist, _) = model.decode_step(&state, &h, &input.pointer_map, model.vocab().bos()).unwrap();
    assert_eq!(dist.p_gen, 1.0);
    assert!(dist.probs[v..].iter().all(|p| *p == 0.0));

    model.params_mut().get_mut(gate).data[0] = -1e4;
    let (dist, _) = model.decode_step(&state, &h, &input.pointer_map, model.vocab().bos()).unwrap();
    let argmax = (0..dist.probs.len()).max_by(|&a, &b| dist.probs[a].total_cmp(&dist.probs[b])).unwrap();
    assert!(argmax >= v);
    assert!(dist.probs[..v].iter().all(|p| *p == 0.0));
}

#[test]
fn zero_memory_initializes_state_to_projection_bias() {
    let c = config(8, 1, 2, &[], 2);
    let mut model = Model::<f32>::new(c.clone()).unwrap();
    let hb = param_index(&model, "decoder.init.h.bias");
    let cb = param_index(&model, "decoder.init.c.bias");
    for (i, x) in model.params_mut().get_mut(hb).data.iter_mut().enumerate() {
        *x = 0.1 * i as f32 - 0.3;
    }
    for (i, x) in model.params_mut().get_mut(cb).data.iter_mut().enumerate() {
        *x = 0.7 - 0.05 * i as f32;
    }
    let zero = t2v_neural::Tensor::zeros(5, c.d_model);
    let state = model.init_decoder(&zero).unwrap();
    assert_eq!(state.h.data, model.params().get(hb).data);
    assert_eq!(state.c.data, model.params().get(cb).data);
    assert!(state.context.data.iter().all(|x| *x == 0.0));
    assert!(model.init_decoder(&t2v_neural::Tensor::zeros(5, c.d_model + 1)).is_err());
}

#[test]
fn decoding_is_deterministic_for_fixed_parameters() {
    let c = config(12, 2, 2, &["电影"], 8);
    let a = Model::<f32>::new(c.clone()).unwrap();
    let b = Model::<f32>::new(c).unwrap();
    let x = a.beam_search("电影票房", &schema(), 3, 3).unwrap();
    let y = b.beam_search("电影票房", &schema(), 3, 3).unwrap();
    assert_eq!(x.candidates, y.candidates);
}

proptest::proptest! {
    #[test]
    fn serialization_invariants_hold(question in "[a-z电影票房数量各的 ]{1,20}") {
        let c = config(8, 1, 2, &[], 1);
        let s = schema();
        match serialize_input(&question, &s, &c) {
            Ok(input) => {
                let elements: usize = s.tables.iter().map(|t| 1 + t.columns.len()).sum();
                proptest::prop_assert_eq!(input.pointer_map.len(), elements);
                proptest::prop_assert_eq!(input.len(), 1 + input.question_len + 2 * elements);
                proptest::prop_assert_eq!(input.question_len, question.chars().count());
                for (i, ch) in question.chars().enumerate() {
                    proptest::prop_assert_eq!(&input.tokens[input.char_position(i)].surface, &ch.to_string());
                }
            }
            Err(e) => proptest::prop_assert!(matches!(e, NeuralError::EmptyQuestion) && question.trim().is_empty()),
        }
    }
}
