use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use socdim_core::features::{FeatureConfig, FeatureExtractor, TextFeatures};
use socdim_core::learn::{evaluate, EvalConfig, GbdtGrid, LogregGrid, ModelKind};
use socdim_core::par::Execution;
use socdim_core::synthetic::{planted_corpus, PlantedConfig};
use socdim_core::{Dimension, Resources};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn extraction(c: &mut Criterion) {
    let resources = Resources::bundled();
    let corpus = planted_corpus(&PlantedConfig { sentences: 2000, seed: 1, ..Default::default() }, &resources);
    let sentences = corpus.sentences();
    let extractor = FeatureExtractor::new(resources, FeatureConfig::default());
    let mut group = c.benchmark_group("extract_all");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| extractor.extract_all(exec, &sentences, None).unwrap())
        });
    }
    group.finish();
}

fn cross_validation(c: &mut Criterion) {
    let resources = Resources::bundled();
    let corpus = planted_corpus(&PlantedConfig { sentences: 600, seed: 2, ..Default::default() }, &resources);
    let sentences = corpus.sentences();
    let labels = corpus.labels(Dimension::Fun);
    let extractor = FeatureExtractor::new(resources, FeatureConfig::default());
    let mut group = c.benchmark_group("evaluate");
    group.sample_size(10);
    for (name, exec) in MODES {
        let source = TextFeatures::new(&extractor, Dimension::Fun, &sentences, 10, 0.01, exec);
        // A reduced grid keeps one sample in the low seconds.
        let config = EvalConfig {
            seed: 3,
            exec,
            logreg: LogregGrid { learning_rate: vec![0.1], l2: vec![0.001], epochs: vec![200] },
            gbdt: GbdtGrid { learning_rate: vec![0.1], max_depth: vec![4], rounds: vec![50], min_leaf: vec![1] },
            ..Default::default()
        };
        for kind in [ModelKind::Logreg, ModelKind::Gbdt] {
            group.bench_function(BenchmarkId::new(kind.to_string(), name), |b| {
                b.iter(|| evaluate(Dimension::Fun, kind, &labels, &source, &config).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, extraction, cross_validation);
criterion_main!(benches);
