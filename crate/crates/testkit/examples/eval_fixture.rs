//! Writes `fixtures/eval/{gold,preds}.jsonl`: 2562 gold samples and ranked
//! predictions whose first matches sit at chosen ranks and whose failed
//! top-1 candidates carry chosen error flags.

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use t2v_core::dataset::{load_schemas, write_corpus, DatabaseSchema};
use t2v_core::metrics::{classify_error, predictions_to_jsonl, ErrorSet, PredictionRecord};
use t2v_core::vql::{canonicalize, parse_vql, tree_match, unparse_vql, VqlQuery};
use t2v_neural::generate_synthetic_corpus;
use t2v_testkit::{mutate, respell, rng};

const TOTAL: usize = 2562;
/// First-match rank bands: (rank range, samples).
const BANDS: [(usize, usize, usize); 4] = [(1, 1, 2061), (2, 3, 160), (4, 5, 41), (6, 8, 108)];
/// Top-1 error flags of the failures: (vis, axis, data, samples).
const FLAGS: [(bool, bool, bool, usize); 4] =
    [(true, false, false, 39), (false, true, false, 238), (false, false, true, 157), (false, true, true, 67)];

fn wrong(r: &mut impl Rng, gold: &VqlQuery, schema: &DatabaseSchema, want: Option<ErrorSet>) -> VqlQuery {
    for _ in 0..10_000 {
        let (mut q, _) = mutate(r, gold, schema);
        if r.random_bool(0.5) {
            q = mutate(r, &q, schema).0;
        }
        let Ok(c) = canonicalize(&q, schema) else { continue };
        if tree_match(&c, gold, schema).unwrap_or(true) {
            continue;
        }
        if want.is_none_or(|w| classify_error(Some(&c), gold, schema) == w) {
            return c;
        }
    }
    panic!("no mutation of {} with flags {want:?}", unparse_vql(gold));
}

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let schemas = load_schemas(root.join("data/schemas.json")).unwrap();
    let gold = generate_synthetic_corpus(&schemas, TOTAL, 2562);
    let mut r = rng(804);

    let mut ranks: Vec<Option<usize>> = Vec::with_capacity(TOTAL);
    for (lo, hi, n) in BANDS {
        ranks.extend((0..n).map(|i| Some(lo + i % (hi - lo + 1))));
    }
    ranks.resize(TOTAL, None);
    ranks.shuffle(&mut r);

    let mut flags: Vec<ErrorSet> = FLAGS
        .iter()
        .flat_map(|&(vis_part, axis_part, data_part, n)| std::iter::repeat_n(ErrorSet { vis_part, axis_part, data_part }, n))
        .collect();
    flags.shuffle(&mut r);
    let mut flags = flags.into_iter();

    let mut preds = Vec::with_capacity(TOTAL);
    for (s, rank) in gold.iter().zip(&ranks) {
        let schema = schemas.get(&s.db_id).unwrap();
        let g = canonicalize(&parse_vql(&s.vql).unwrap(), schema).unwrap();
        let len = match rank {
            Some(k) => (*k).max(3),
            None => r.random_range(1..=8),
        };
        let mut candidates = Vec::with_capacity(len);
        for pos in 1..=len {
            let q = if Some(pos) == *rank {
                respell(&mut r, &g, schema)
            } else if pos == 1 {
                wrong(&mut r, &g, schema, Some(flags.next().expect("one flag set per failure")))
            } else {
                wrong(&mut r, &g, schema, None)
            };
            candidates.push(unparse_vql(&q));
        }
        preds.push(PredictionRecord { id: s.id.clone(), candidates });
    }
    assert!(flags.next().is_none());

    std::fs::create_dir_all(root.join("eval")).unwrap();
    write_corpus(root.join("eval/gold.jsonl"), &gold).unwrap();
    std::fs::write(root.join("eval/preds.jsonl"), predictions_to_jsonl(&preds)).unwrap();
    println!("wrote {} gold samples and predictions", gold.len());
}
