use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use t2v_core::compiler::evaluate_all;
use t2v_core::dataset::{load_corpus, load_schemas, LoadMode, Sample};
use t2v_core::metrics::{evaluate_with, PredictionRecord};
use t2v_core::vql::{canonicalize, VqlQuery};
use t2v_core::Exec;
use t2v_testkit::{mutate, random_instance, rng, InstanceConfig};

fn modes() -> Vec<(&'static str, Exec)> {
    let mut m = vec![("sequential", Exec::Sequential)];
    #[cfg(feature = "parallel")]
    m.push(("parallel", Exec::Parallel));
    m
}

fn bench_evaluate(c: &mut Criterion) {
    let mut rng = rng(99);
    let cfg = InstanceConfig { max_tables: 2, max_rows: 300, null_rate: 0.1 };
    let inst = random_instance(&mut rng, &cfg);
    let mut queries: Vec<VqlQuery> = vec![inst.query.clone()];
    while queries.len() < 256 {
        let base = queries[queries.len() / 2].clone();
        let (q, _) = mutate(&mut rng, &base, &inst.schema);
        if let Ok(q) = canonicalize(&q, &inst.schema) {
            queries.push(q);
        }
    }
    let mut group = c.benchmark_group("evaluate_all");
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| evaluate_all(&queries, &inst.db, exec))
        });
    }
    group.finish();
}

fn bench_metrics(c: &mut Criterion) {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let schemas = load_schemas(root.join("data/schemas.json")).unwrap();
    let base = load_corpus(root.join("corpus.jsonl"), &schemas, LoadMode::Strict).unwrap();
    let gold: Vec<Sample> = (0..200)
        .flat_map(|i| {
            base.iter().map(move |s| Sample { id: format!("{}-{i}", s.id), ..s.clone() })
        })
        .collect();
    // Top candidate is another sample's query, the gold one comes second.
    let preds: Vec<PredictionRecord> = gold
        .iter()
        .enumerate()
        .map(|(i, s)| PredictionRecord {
            id: s.id.clone(),
            candidates: vec![gold[(i + 1) % gold.len()].vql.clone(), s.vql.clone()],
        })
        .collect();
    let mut group = c.benchmark_group("metrics");
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| evaluate_with(&preds, &gold, &schemas, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_evaluate, bench_metrics);
criterion_main!(benches);
