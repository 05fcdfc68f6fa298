//! End-to-end acceptance checks. Prints one PASS / FAIL / SKIPPED line per
//! criterion and exits non-zero if any criterion fails.
//!
//! Criteria 11 and 12 use released data when pointed at it:
//! `SOCDIM_LABELED_CSV` (sentence_id,text,dimension labels),
//! `SOCDIM_EMBEDDINGS` (300-d text vectors) and `SOCDIM_ANNOTATIONS`
//! (annotation export).

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use socdim_core::analytics::{
    durbin_watson, label_messages, ols_regress, relationship_label, timeline, Abstain, RelationshipOutcome,
    TextLabeling, DEFAULT_MIN_MESSAGES, DEFAULT_THRESHOLD,
};
use socdim_core::annotations::{apply_gold_gate, build_training_sets, consensus_labels, label_distribution};
use socdim_core::corpus::{labeled_training_sets, load_annotations, load_sentence_table, AnnotationRecord};
use socdim_core::embeddings::{
    anchor_vector, distance_score, load_embeddings_filtered, pseudo_confidence, sentence_vector, EmbeddingStore,
};
use socdim_core::features::{base_rows, select_ngrams, FeatureConfig, FeatureExtractor, NgramParams, TextFeatures};
use socdim_core::learn::{
    auc, evaluate, evaluate_scores, make_folds, oversample, train_model, write_reports_csv, EvalConfig,
    LogisticModel, LogisticObjective, ModelKind, ModelScorer, Standardizer,
};
use socdim_core::par::Execution;
use socdim_core::synthetic::{message_stream, pair_messages, planted_corpus, PlantedConfig, StreamConfig};
use socdim_core::text::{tokenize, Sentence, Token};
use socdim_core::{Dimension, Resources};

// Pinned tolerances and limits.
const AUC_INSTANCES: usize = 1000;
const AUC_MAX_N: usize = 50;
const AUC_TOL: f64 = 1e-12;
const AUC_TIME_LIMIT: Duration = Duration::from_secs(5);
const GRAD_INSTANCES: usize = 100;
const GRAD_STEP: f64 = 1e-5;
const GRAD_REL_TOL: f64 = 1e-6;
const GRAD_REL_FLOOR: f64 = 1e-3;
const OLS_INSTANCES: usize = 100;
const OLS_TOL: f64 = 1e-8;
const VECTOR_TOL: f64 = 1e-12;
const XI_TOL: f64 = 1e-12;
const PLANTED_MIN_AUC: f64 = 0.90;
const PLANTED_TIME_LIMIT: Duration = Duration::from_secs(120);
const NULL_AUC_RANGE: (f64, f64) = (0.40, 0.60);
const NULL_PER_CLASS: usize = 200;
const BURST_MIN_Z: f64 = 2.0;
const EMBEDDING_TOL: f64 = 0.05;
const REFERENCE_FUN_AUC: f64 = 0.83;
const REFERENCE_STATUS_AUC: f64 = 0.78;
const RELEASED_DISTRIBUTION: [f64; 4] = [0.41, 0.53, 0.05, 0.01];

enum Outcome {
    Pass(String),
    Fail(String),
    Skipped(String),
}

use Outcome::*;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn main() {
    let criteria: Vec<(usize, &str, fn() -> Outcome)> = vec![
        (1, "auc matches exhaustive pair counting", c1_auc_oracle),
        (2, "logistic gradient matches finite differences", c2_gradient),
        (3, "ols matches normal-equations oracle", c3_ols),
        (4, "sentence vector properties", c4_sentence_vectors),
        (5, "n-gram ranking matches brute force", c5_log_odds),
        (6, "protocol fidelity", c6_protocol),
        (7, "planted-signal end to end", c7_planted),
        (8, "null baseline", c8_null),
        (9, "timeline burst and constant stream", c9_timeline),
        (10, "relationship rule", c10_relationship),
        (11, "released data: embedding and feature AUCs", c11_released),
        (12, "consensus and gold gate", c12_consensus),
    ];
    let only: Option<BTreeSet<usize>> =
        std::env::var("SOCDIM_ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (id, name, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Fail(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Skipped(d) => ("SKIPPED", d),
        };
        println!("criterion {id:>2} {tag:<7} {name} ({secs:.1}s): {detail}");
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Both classes present, scores drawn from a few levels so ties are common.
fn random_auc_instance(r: &mut ChaCha8Rng) -> (Vec<f64>, Vec<bool>) {
    loop {
        let n = r.gen_range(2..=AUC_MAX_N);
        let levels = r.gen_range(1..=8);
        let scores: Vec<f64> = (0..n).map(|_| r.gen_range(0..levels) as f64 * 0.25 - 0.5).collect();
        let labels: Vec<bool> = (0..n).map(|_| r.gen_bool(0.4)).collect();
        if labels.iter().any(|&l| l) && labels.iter().any(|&l| !l) {
            return (scores, labels);
        }
    }
}

/// (2 * wins + ties) / (2 * positives * negatives) over all pairs.
fn pair_count_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut twice, mut np, mut nn) = (0u64, 0u64, 0u64);
    for (i, &li) in labels.iter().enumerate() {
        if li {
            np += 1;
        } else {
            nn += 1;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                twice += match scores[i].partial_cmp(&scores[j]).unwrap() {
                    std::cmp::Ordering::Greater => 2,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Less => 0,
                };
            }
        }
    }
    twice as f64 / (2 * np * nn) as f64
}

fn c1_auc_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    let mut ties = 0;
    for _ in 0..AUC_INSTANCES {
        let (scores, labels) = random_auc_instance(&mut r);
        let mut sorted = scores.clone();
        sorted.sort_by(f64::total_cmp);
        ties += usize::from(sorted.windows(2).any(|w| w[0] == w[1]));
        let got = match auc(&scores, &labels) {
            Ok(a) => a,
            Err(e) => return Fail(format!("auc error: {e}")),
        };
        worst = worst.max((got - pair_count_auc(&scores, &labels)).abs());
    }
    let elapsed = start.elapsed();
    check(
        worst <= AUC_TOL && elapsed < AUC_TIME_LIMIT && ties > AUC_INSTANCES / 2,
        format!("{AUC_INSTANCES} instances ({ties} with ties), max |diff| {worst:.2e} (tol {AUC_TOL:.0e}), {:.2}s", elapsed.as_secs_f64()),
    )
}

fn c2_gradient() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..GRAD_INSTANCES {
        let n = r.gen_range(5..=40);
        let dim = r.gen_range(1..=8);
        let density: Vec<f64> = (0..dim).map(|_| r.gen_range(0.2..1.0)).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| density.iter().map(|&p| if r.gen_bool(p) { r.gen_range(-3.0..3.0) } else { 0.0 }).collect())
            .collect();
        let mut labels: Vec<bool> = (0..n).map(|_| r.gen_bool(0.5)).collect();
        labels[0] = true;
        labels[1] = false;
        let weights: Vec<f64> = (0..n).map(|_| r.gen_range(0.5..3.0)).collect();
        let l2 = [0.0, 0.01, 0.1][r.gen_range(0..3)];
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let std = Standardizer::fit(&refs, &weights);
        let obj = LogisticObjective::new(&refs, &labels, Some(&weights), Some(&std), l2).expect("valid instance");
        let model = LogisticModel { weights: (0..dim).map(|_| r.gen_range(-1.0..1.0)).collect(), bias: r.gen_range(-1.0..1.0) };
        let (_, grad, grad_b) = obj.evaluate(&model);
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(GRAD_REL_FLOOR);
        for j in 0..=dim {
            let shifted = |h: f64| {
                let mut m = model.clone();
                if j < dim {
                    m.weights[j] += h;
                } else {
                    m.bias += h;
                }
                obj.loss(&m)
            };
            let fd = (shifted(GRAD_STEP) - shifted(-GRAD_STEP)) / (2.0 * GRAD_STEP);
            let analytic = if j < dim { grad[j] } else { grad_b };
            worst = worst.max(rel(analytic, fd));
        }
    }
    check(
        worst <= GRAD_REL_TOL,
        format!("{GRAD_INSTANCES} instances, max relative error {worst:.2e} (tol {GRAD_REL_TOL:.0e}, floor {GRAD_REL_FLOOR:.0e})"),
    )
}

struct OlsOracle {
    beta: Vec<f64>,
    se: Vec<f64>,
    adj_r2: f64,
    dw: f64,
}

fn zscore_sample(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    v.iter().map(|x| (x - m) / sd).collect()
}

/// Normal equations solved by nalgebra's LU inverse.
fn ols_oracle(y: &[f64], cols: &[Vec<f64>]) -> OlsOracle {
    let (n, p) = (y.len(), cols.len());
    let x = nalgebra::DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { cols[j - 1][i] });
    let yv = nalgebra::DVector::from_column_slice(y);
    let xtx_inv = (x.transpose() * &x).try_inverse().expect("full rank");
    let beta = &xtx_inv * x.transpose() * &yv;
    let e = &yv - &x * &beta;
    let rss = e.dot(&e);
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let dof = (n - p - 1) as f64;
    let sigma2 = rss / dof;
    let r2 = 1.0 - rss / tss;
    let dw = (1..n).map(|t| (e[t] - e[t - 1]).powi(2)).sum::<f64>() / rss;
    OlsOracle {
        beta: beta.iter().copied().collect(),
        se: (0..=p).map(|j| (sigma2 * xtx_inv[(j, j)]).sqrt()).collect(),
        adj_r2: 1.0 - (1.0 - r2) * (n as f64 - 1.0) / dof,
        dw,
    }
}

fn c3_ols() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    let close = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    for inst in 0..OLS_INSTANCES {
        let n = r.gen_range(8..=30);
        let p = r.gen_range(1..=4);
        let standardize = inst % 2 == 1;
        let cols: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| r.gen_range(-5.0..5.0)).collect()).collect();
        let coef: Vec<f64> = (0..=p).map(|_| r.gen_range(-2.0..2.0)).collect();
        let y: Vec<f64> =
            (0..n).map(|i| coef[0] + (0..p).map(|j| coef[j + 1] * cols[j][i]).sum::<f64>() + r.gen_range(-1.0..1.0)).collect();
        let region = |i: usize| format!("r{i:03}");
        let outcome: BTreeMap<String, f64> = (0..n).map(|i| (region(i), y[i])).collect();
        let predictors: Vec<(String, BTreeMap<String, f64>)> =
            cols.iter().enumerate().map(|(j, c)| (format!("x{j}"), (0..n).map(|i| (region(i), c[i])).collect())).collect();
        let got = match ols_regress("y", &outcome, &predictors, standardize) {
            Ok(g) => g,
            Err(e) => return Fail(format!("instance {inst}: {e}")),
        };
        let oracle = if standardize {
            ols_oracle(&zscore_sample(&y), &cols.iter().map(|c| zscore_sample(c)).collect::<Vec<_>>())
        } else {
            ols_oracle(&y, &cols)
        };
        let all: Vec<_> = std::iter::once(&got.intercept).chain(&got.coefficients).collect();
        for (j, c) in all.iter().enumerate() {
            worst = worst.max(close(c.beta, oracle.beta[j])).max(close(c.std_error, oracle.se[j]));
        }
        worst = worst.max(close(got.adj_r_squared, oracle.adj_r2));
        match got.durbin_watson {
            Some(dw) => worst = worst.max(close(dw, oracle.dw)),
            None => return Fail(format!("instance {inst}: missing Durbin-Watson")),
        }
    }
    let xs: BTreeMap<String, f64> = (0..6).map(|i| (format!("r{i}"), i as f64)).collect();
    let ys: BTreeMap<String, f64> = xs.iter().map(|(k, x)| (k.clone(), 2.0 + 3.0 * x)).collect();
    let perfect = ols_regress("y", &ys, &[("x".into(), xs)], true).map_err(|e| e.to_string());
    let perfect_r2 = perfect.as_ref().map(|p| p.r_squared).unwrap_or(f64::NAN);
    let dw = durbin_watson(&[1.0, -1.0, 1.0, -1.0]);
    check(
        worst <= OLS_TOL && perfect_r2 == 1.0 && dw == Some(3.0),
        format!(
            "{OLS_INSTANCES} datasets, max relative diff {worst:.2e} (tol {OLS_TOL:.0e}); perfect fit R2 = {perfect_r2}; DW[1,-1,1,-1] = {dw:?}"
        ),
    )
}

fn c4_sentence_vectors() -> Outcome {
    let store = EmbeddingStore::from_pairs(
        3,
        [("cat", vec![1.0, 2.0, 3.0]), ("dog", vec![-1.0, 0.5, 4.0]), ("sun", vec![0.25, -2.0, 0.0])],
    )
    .expect("toy store");
    let vec_of = |text: &str| sentence_vector(&tokenize(text), &store);
    let mut failures = Vec::new();
    let hand = [(1.0 + -1.0 + 0.25) / 3.0, (2.0 + 0.5 - 2.0) / 3.0, (3.0 + 4.0 + 0.0) / 3.0];
    let got = vec_of("cat dog sun").expect("in vocabulary");
    if got.iter().zip(&hand).any(|(a, b)| (a - b).abs() > VECTOR_TOL) {
        failures.push(format!("mean {got:?} != hand {hand:?}"));
    }
    let perm = vec_of("sun cat dog").expect("in vocabulary");
    if perm.iter().zip(&got).any(|(a, b)| (a - b).abs() > VECTOR_TOL) {
        failures.push("not permutation invariant".into());
    }
    let oov = vec_of("cat zebra dog unicorn").expect("in vocabulary");
    let cat_dog = [0.0, 1.25, 3.5];
    if oov.iter().zip(&cat_dog).any(|(a, b)| (a - b).abs() > VECTOR_TOL) {
        failures.push(format!("oov not skipped: {oov:?}"));
    }
    if vec_of("zebra unicorn").is_ok() {
        failures.push("all-oov sentence produced a vector".into());
    }
    if vec_of("dog").ok() != Some(vec![-1.0, 0.5, 4.0]) {
        failures.push("single word is not its own vector".into());
    }
    check(failures.is_empty(), if failures.is_empty() { "hand mean, permutation, oov skip and identity hold".into() } else { failures.join("; ") })
}

/// Unigrams and bigrams of whitespace-separated lowercase words.
fn brute_force_ngrams(corpus: &[Vec<&str>], positives: &[usize], min_count: usize, k: usize, alpha: f64) -> Vec<(String, f64)> {
    let grams = |s: &Vec<&str>| -> Vec<String> {
        let mut g: Vec<String> = s.iter().map(|w| w.to_string()).collect();
        g.extend(s.windows(2).map(|w| format!("{} {}", w[0], w[1])));
        g
    };
    let mut all: BTreeMap<String, usize> = BTreeMap::new();
    let mut pos: BTreeMap<String, usize> = BTreeMap::new();
    for (i, s) in corpus.iter().enumerate() {
        for g in grams(s) {
            *all.entry(g.clone()).or_default() += 1;
            if positives.contains(&i) {
                *pos.entry(g).or_default() += 1;
            }
        }
    }
    let n_all: usize = all.values().sum();
    let n_pos: usize = pos.values().sum();
    let v = all.len() as f64;
    let mut out: Vec<(String, f64)> = all
        .iter()
        .filter(|(_, &c)| c >= min_count)
        .map(|(g, &c)| {
            let cp = pos.get(g).copied().unwrap_or(0) as f64;
            let xi = ((cp + alpha) / (n_pos as f64 + alpha * v)).ln() - ((c as f64 + alpha) / (n_all as f64 + alpha * v)).ln();
            (g.clone(), xi)
        })
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out.truncate(k);
    out
}

fn c5_log_odds() -> Outcome {
    let mut r = rng(5);
    let words = ["a", "b", "c", "d", "e", "f"];
    let mut texts: Vec<String> = (0..50)
        .map(|_| (0..r.gen_range(3..=7)).map(|_| *words.choose(&mut r).unwrap()).collect::<Vec<_>>().join(" "))
        .collect();
    // "eta" and "zeta" tie exactly; "kappa" sits at the cutoff, "lambda" just under it.
    for (i, t) in texts.iter_mut().enumerate() {
        if i < 12 {
            t.push_str(" eta . zeta");
        }
        if i % 5 == 0 {
            t.push_str(" . kappa");
        }
        if i % 6 == 1 && i < 50 {
            t.push_str(" . lambda");
        }
    }
    let positives: Vec<usize> = (0..20).collect();
    let sentences: Vec<Vec<Token>> = texts.iter().map(|t| tokenize(t)).collect();
    let split: Vec<Vec<&str>> = texts.iter().map(|t| t.split_whitespace().filter(|w| *w != ".").collect()).collect();
    // The oracle sees sentences as word runs; "." breaks bigrams like any non-word token.
    let runs: Vec<Vec<&str>> = texts.iter().flat_map(|t| t.split(" . ").map(|p| p.split_whitespace().collect())).collect();
    let run_owner: Vec<usize> = texts.iter().enumerate().flat_map(|(i, t)| std::iter::repeat_n(i, t.split(" . ").count())).collect();
    let pos_runs: Vec<usize> = (0..runs.len()).filter(|&j| positives.contains(&run_owner[j])).collect();
    let counts = |w: &str| split.iter().flatten().filter(|x| **x == w).count();
    let (kappa, lambda) = (counts("kappa"), counts("lambda"));
    let mut failures = Vec::new();
    for k in [8, 200] {
        let oracle = brute_force_ngrams(&runs, &pos_runs, 10, k, 0.01);
        let all: Vec<&[Token]> = sentences.iter().map(Vec::as_slice).collect();
        let pos: Vec<&[Token]> = positives.iter().map(|&i| sentences[i].as_slice()).collect();
        let params = NgramParams { min_count: 10, k, alpha: 0.01 };
        let got = match select_ngrams(Dimension::Support, &pos, &all, params, Execution::Sequential) {
            Ok(v) => v,
            Err(e) => return Fail(e.to_string()),
        };
        let names: Vec<&str> = got.entries.iter().map(|e| e.ngram.as_str()).collect();
        let expected: Vec<&str> = oracle.iter().map(|e| e.0.as_str()).collect();
        if names != expected {
            failures.push(format!("k={k}: got {names:?}, oracle {expected:?}"));
        }
        if got.entries.iter().zip(&oracle).any(|(g, o)| (g.xi - o.1).abs() > XI_TOL) {
            failures.push(format!("k={k}: xi values differ"));
        }
        if k == 200 {
            let has = |w: &str| names.contains(&w);
            let eta = names.iter().position(|n| *n == "eta");
            let zeta = names.iter().position(|n| *n == "zeta");
            if !has("kappa") || has("lambda") {
                failures.push(format!("cutoff: kappa ({kappa}) kept {}, lambda ({lambda}) kept {}", has("kappa"), has("lambda")));
            }
            if !matches!((eta, zeta), (Some(a), Some(b)) if b == a + 1) {
                failures.push("tie between eta and zeta not broken lexicographically".into());
            }
        }
    }
    check(
        failures.is_empty() && kappa == 10 && lambda == 9,
        if failures.is_empty() {
            format!("top-8 and full rankings equal brute force; kappa ({kappa}) kept, lambda ({lambda}) cut, eta before zeta")
        } else {
            failures.join("; ")
        },
    )
}

fn c6_protocol() -> Outcome {
    let mut failures = Vec::new();
    let pos: Vec<usize> = (0..100).collect();
    let neg: Vec<usize> = (100..500).collect();
    let plan = make_folds(&pos, &neg, 10, 6).expect("fold plan");
    let mut tests_seen = BTreeSet::new();
    for (i, f) in plan.folds.iter().enumerate() {
        for (class, total) in [(true, 100usize), (false, 400usize)] {
            let pick = |s: &socdim_core::learn::Split<usize>| if class { s.positives.clone() } else { s.negatives.clone() };
            let (tr, tu, te) = (pick(&f.train), pick(&f.tune), pick(&f.test));
            let mut union: Vec<usize> = tr.iter().chain(&tu).chain(&te).copied().collect();
            union.sort_unstable();
            let before = union.len();
            union.dedup();
            if before != union.len() || union.len() != total {
                failures.push(format!("fold {i}: splits overlap or miss samples"));
            }
            if te.len() * 10 != total || tu.len() * 10 != total || tr.len() * 10 != total * 8 {
                failures.push(format!("fold {i}: sizes {}/{}/{} of {total}", tr.len(), tu.len(), te.len()));
            }
            tests_seen.extend(te);
        }
        for (name, split) in [("train", &f.train), ("tune", &f.tune), ("test", &f.test)] {
            let labeled = split.labeled();
            let over = oversample(&labeled, 60 + i as u64).expect("two classes");
            let np = over.iter().filter(|x| x.1).count();
            let originals: BTreeSet<usize> = labeled.iter().map(|x| x.0).collect();
            let kept: BTreeSet<usize> = over.iter().map(|x| x.0).collect();
            if np * 2 != over.len() || originals != kept {
                failures.push(format!("fold {i} {name}: oversampled {np} of {} or lost ids", over.len()));
            }
        }
    }
    if tests_seen.len() != 500 {
        failures.push(format!("test splits cover {} of 500 samples", tests_seen.len()));
    }

    let corpus = planted_corpus(&PlantedConfig { sentences: 400, seed: 66, ..Default::default() }, &Resources::bundled());
    let sentences = corpus.sentences();
    let labels: Vec<bool> = corpus.planted.iter().map(Option::is_some).collect();
    let extractor = FeatureExtractor::new(Resources::bundled(), FeatureConfig::default());
    let run = |exec: Execution| -> Vec<u8> {
        let source = TextFeatures::new(&extractor, Dimension::Trust, &sentences, 10, 0.01, exec);
        let config = EvalConfig { seed: 6, exec, ..Default::default() };
        let reports: Vec<_> = [ModelKind::Logreg, ModelKind::Gbdt]
            .iter()
            .map(|&k| evaluate(Dimension::Trust, k, &labels, &source, &config).expect("evaluation"))
            .collect();
        let mut out = Vec::new();
        write_reports_csv(&reports, &mut out).expect("csv");
        out
    };
    let (a, b, c) = (run(Execution::Parallel), run(Execution::Parallel), run(Execution::Sequential));
    if a != b {
        failures.push("two runs with one seed differ".into());
    }
    if a != c {
        failures.push("sequential and parallel runs differ".into());
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("10 folds disjoint 80/10/10 per class, every split balanced after oversampling, reruns byte-identical ({} bytes)", a.len())
        } else {
            failures.join("; ")
        },
    )
}

fn c8_null() -> Outcome {
    let (sentences, corpus) = planted();
    let mut labels: Vec<bool> = corpus.planted.iter().map(Option::is_some).collect();
    labels.shuffle(&mut rng(8));
    let per_class = labels.iter().filter(|&&l| l).count().min(labels.iter().filter(|&&l| !l).count());
    if per_class < NULL_PER_CLASS {
        return Fail(format!("only {per_class} samples per class"));
    }
    let extractor = FeatureExtractor::new(Resources::bundled(), FeatureConfig::default());
    let source = TextFeatures::new(&extractor, Dimension::Fun, &sentences, 10, 0.01, Execution::Parallel);
    let config = EvalConfig { seed: 8, ..Default::default() };
    let mut means = Vec::new();
    for kind in [ModelKind::Logreg, ModelKind::Gbdt] {
        match evaluate(Dimension::Fun, kind, &labels, &source, &config) {
            Ok(r) => means.push((kind, r.mean)),
            Err(e) => return Fail(e.to_string()),
        }
    }
    let (lo, hi) = NULL_AUC_RANGE;
    check(
        means.iter().all(|(_, m)| (lo..=hi).contains(m)),
        format!(
            "permuted labels, {per_class} per class: {} (need [{lo}, {hi}])",
            means.iter().map(|(k, m)| format!("{k} {m:.3}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

/// Logistic-regression models for every dimension, trained once on the
/// planted corpus.
fn planted_scorers() -> &'static [ModelScorer] {
    static SCORERS: OnceLock<Vec<ModelScorer>> = OnceLock::new();
    SCORERS.get_or_init(|| {
        let (sentences, corpus) = planted();
        let resources = Resources::bundled();
        let extractor = FeatureExtractor::new(resources.clone(), FeatureConfig::default());
        let config = EvalConfig { seed: 9, ..Default::default() };
        let base = base_rows(&extractor, &sentences, Execution::Parallel);
        Dimension::ALL
            .iter()
            .map(|&d| {
                let source =
                    TextFeatures::with_base(&extractor, d, &sentences, &base, 10, 0.01, Execution::Parallel).expect("aligned");
                let model = train_model(d, ModelKind::Logreg, &corpus.labels(d), &source, &config).expect("trainable");
                ModelScorer::new(model, resources.clone(), None).expect("feature model")
            })
            .collect()
    })
}

fn c9_timeline() -> Outcome {
    let resources = Resources::bundled();
    let scorers = planted_scorers();
    let support = std::slice::from_ref(scorers.iter().find(|s| s.dimension() == Dimension::Support).expect("support scorer"));
    let burst_week = 7;
    let stream = |burst| StreamConfig {
        weeks: 12,
        start: chrono::NaiveDate::from_ymd_opt(2024, 1, 1).unwrap(),
        per_week: 40,
        background: vec![(Dimension::Support, 4), (Dimension::Fun, 6)],
        burst,
        seed: 9,
    };
    let series = |cfg: &StreamConfig| {
        let messages = message_stream(cfg, &resources);
        let labelings = label_messages(Execution::Parallel, &messages, support, &resources.text, DEFAULT_THRESHOLD)?;
        timeline(&messages, &labelings, Dimension::Support)
    };
    let burst = match series(&stream(Some((burst_week, Dimension::Support, 12)))) {
        Ok(s) => s,
        Err(e) => return Fail(e.to_string()),
    };
    let flat = match series(&stream(None)) {
        Ok(s) => s,
        Err(e) => return Fail(e.to_string()),
    };
    let z: Vec<f64> = burst.buckets.iter().map(|b| b.zscore).collect();
    let argmax = (0..z.len()).fold(0, |best, i| if z[i] > z[best] { i } else { best });
    let flat_zero = flat.degenerate && flat.buckets.iter().all(|b| b.zscore == 0.0);
    check(
        argmax == burst_week && z[argmax] >= BURST_MIN_Z && flat_zero && z.len() == 12,
        format!(
            "burst in week {burst_week}: argmax week {argmax}, peak z {:.2} (need >= {BURST_MIN_Z}); constant stream flagged {} with all-zero z {}",
            z[argmax],
            flat.degenerate,
            flat.buckets.iter().all(|b| b.zscore == 0.0)
        ),
    )
}

fn c10_relationship() -> Outcome {
    let resources = Resources::bundled();
    let scorers = planted_scorers();
    let fixture = |n: usize| -> Vec<Option<Dimension>> {
        (0..n)
            .map(|i| match i % 5 {
                0 | 2 | 4 => Some(Dimension::Romance),
                1 => Some(Dimension::Fun),
                _ => None,
            })
            .collect()
    };
    let outcome = |n: usize| -> socdim_core::Result<RelationshipOutcome> {
        let messages = pair_messages(&fixture(n), 10, &resources);
        let labelings = label_messages(Execution::Parallel, &messages, scorers, &resources.text, DEFAULT_THRESHOLD)?;
        let refs: Vec<&TextLabeling> = labelings.iter().collect();
        Ok(relationship_label(&refs, DEFAULT_MIN_MESSAGES))
    };
    let (big, small) = match (outcome(25), outcome(19)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Fail(e.to_string()),
    };
    let labeled = matches!(big, RelationshipOutcome::Label { dimension: Dimension::Romance, .. });
    let abstained = matches!(small, RelationshipOutcome::Abstain(Abstain::TooFewMessages { messages: 19, .. }));
    check(labeled && abstained, format!("25 messages -> {big:?}; 19 messages -> {small:?}"))
}

fn read_labeled(path: &str) -> socdim_core::Result<(Vec<Sentence>, socdim_core::annotations::TrainingSets, Vec<String>)> {
    let rows = load_sentence_table(std::path::Path::new(path))?;
    let sets = labeled_training_sets(&rows)?;
    let sentences = rows.iter().map(|r| Sentence::from_text(&r.text)).collect();
    Ok((sentences, sets, rows.into_iter().map(|r| r.id).collect()))
}

fn c11_released() -> Outcome {
    let (Ok(labeled), Ok(vectors)) = (std::env::var("SOCDIM_LABELED_CSV"), std::env::var("SOCDIM_EMBEDDINGS")) else {
        return Skipped("SOCDIM_LABELED_CSV and SOCDIM_EMBEDDINGS not set".into());
    };
    let resources = Resources::bundled();
    let (sentences, sets, ids) = match read_labeled(&labeled) {
        Ok(x) => x,
        Err(e) => return Fail(e.to_string()),
    };
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut vocab: HashSet<String> = sentences.iter().flat_map(|s| s.tokens.iter().map(|t| t.surface.clone())).collect();
    vocab.extend(resources.anchors.values().flatten().cloned());
    let store = match load_embeddings_filtered(std::path::Path::new(&vectors), 300, Some(&vocab)) {
        Ok(s) => s,
        Err(e) => return Fail(e.to_string()),
    };
    let config = EvalConfig { seed: 11, ..Default::default() };
    let extractor = FeatureExtractor::new(resources.clone(), FeatureConfig::default());
    let mut embedding = BTreeMap::new();
    let mut feature = Vec::new();
    for d in Dimension::ALL {
        let set = sets.get(d);
        let members: Vec<usize> = set.positives.iter().chain(&set.negatives).map(|id| index[id.as_str()]).collect();
        let labels: Vec<bool> = (0..members.len()).map(|i| i < set.positives.len()).collect();
        let subset: Vec<Sentence> = members.iter().map(|&i| sentences[i].clone()).collect();
        if matches!(d, Dimension::Fun | Dimension::Status) {
            let anchor = match anchor_vector(d, &store, &resources) {
                Ok(a) => a,
                Err(e) => return Fail(e.to_string()),
            };
            // Sentences without any embedded word get the lowest confidence.
            let scores: Vec<f64> = subset
                .iter()
                .map(|s| distance_score(s, &anchor, &store).map(pseudo_confidence).unwrap_or(0.0))
                .collect();
            match evaluate_scores(d, &labels, &scores, &config) {
                Ok(r) => {
                    embedding.insert(d, r.mean);
                }
                Err(e) => return Fail(e.to_string()),
            }
        }
        let source = TextFeatures::new(&extractor, d, &subset, 10, 0.01, Execution::Parallel);
        match evaluate(d, ModelKind::Gbdt, &labels, &source, &config) {
            Ok(r) => feature.push((d, r.mean)),
            Err(e) => return Fail(e.to_string()),
        }
    }
    feature.sort_by(|a, b| b.1.total_cmp(&a.1));
    let rank: Vec<Dimension> = feature.iter().map(|x| x.0).collect();
    let top3 = &rank[..3];
    let bottom4 = &rank[rank.len() - 4..];
    let fun = embedding[&Dimension::Fun];
    let status = embedding[&Dimension::Status];
    check(
        (fun - REFERENCE_FUN_AUC).abs() <= EMBEDDING_TOL
            && (status - REFERENCE_STATUS_AUC).abs() <= EMBEDDING_TOL
            && top3.contains(&Dimension::Romance)
            && top3.contains(&Dimension::Fun)
            && bottom4.contains(&Dimension::Power)
            && bottom4.contains(&Dimension::Identity),
        format!(
            "embedding fun {fun:.3} (target {REFERENCE_FUN_AUC}), status {status:.3} (target {REFERENCE_STATUS_AUC}), tol {EMBEDDING_TOL}; gbdt ranking {}",
            feature.iter().map(|(d, m)| format!("{d} {m:.3}")).collect::<Vec<_>>().join(" > ")
        ),
    )
}

fn record(sentence: &str, annotator: &str, labels: &[Dimension]) -> AnnotationRecord {
    AnnotationRecord {
        sentence_id: sentence.into(),
        annotator_id: annotator.into(),
        labels: labels.iter().copied().collect(),
        other_flag: labels.is_empty(),
        is_gold: false,
        gold_labels: BTreeSet::new(),
    }
}

fn gold_record(annotator: &str, i: usize, correct: bool) -> AnnotationRecord {
    let mut r = record(&format!("gold{i}"), annotator, &[if correct { Dimension::Trust } else { Dimension::Fun }]);
    r.is_gold = true;
    r.gold_labels = [Dimension::Trust].into();
    r
}

fn c12_consensus() -> Outcome {
    use Dimension::*;
    let mut failures = Vec::new();
    let mut records = Vec::new();
    for i in 0..10 {
        records.push(gold_record("six", i, i < 6));
        records.push(gold_record("seven", i, i < 7));
    }
    records.push(record("s1", "six", &[Support]));
    records.push(record("s1", "seven", &[Support]));
    records.push(record("s1", "nogold", &[Support]));
    let gate = apply_gold_gate(&records, 0.4);
    let banned: Vec<&str> = gate.banned.iter().map(String::as_str).collect();
    if banned != ["six"] {
        failures.push(format!("banned {banned:?}, expected [six]"));
    }
    if gate.kept.iter().any(|r| r.annotator_id == "six") {
        failures.push("records of a banned annotator kept".into());
    }
    if !gate.kept.iter().any(|r| r.annotator_id == "nogold") {
        failures.push("annotator without golds dropped".into());
    }

    let fixtures: [(&str, Vec<&[Dimension]>, BTreeSet<Dimension>); 3] = [
        ("a", vec![&[Support], &[Support, Similarity], &[]], [Support].into()),
        ("b", vec![&[Fun], &[Conflict], &[Status]], BTreeSet::new()),
        ("c", vec![&[Romance], &[Romance], &[Romance]], [Romance].into()),
    ];
    let mut recs = Vec::new();
    for (sid, labels, _) in &fixtures {
        for (k, l) in labels.iter().enumerate() {
            recs.push(record(sid, &format!("ann{k}"), l));
        }
    }
    let consensus = consensus_labels(&recs, 2);
    for (sid, _, expected) in &fixtures {
        match consensus.iter().find(|c| c.sentence_id == *sid) {
            Some(c) if c.positive_dims == *expected => {}
            other => failures.push(format!("sentence {sid}: {:?}, expected {expected:?}", other.map(|c| &c.positive_dims))),
        }
    }
    let mut rev = recs.clone();
    rev.reverse();
    if consensus_labels(&rev, 2) != consensus {
        failures.push("consensus depends on record order".into());
    }
    let sets = build_training_sets(&consensus, Default::default());
    let sup = sets.get(Support);
    if !sup.positives.contains(&"a".to_string()) || sup.negatives.contains(&"a".to_string()) {
        failures.push("support training set wrong for sentence a".into());
    }
    let sim = sets.get(Similarity);
    if sim.positives.contains(&"a".to_string()) || sim.negatives.contains(&"a".to_string()) {
        failures.push("single similarity vote not excluded from both sets".into());
    }
    let dist_fixture: Vec<AnnotationRecord> = [("d0", vec![]), ("d1", vec![Fun]), ("d2", vec![Fun, Trust]), ("d3", vec![Fun, Trust, Power])]
        .iter()
        .flat_map(|(sid, dims)| (0..2).map(move |k| record(sid, &format!("ann{k}"), dims)))
        .collect();
    let dist = label_distribution(&consensus_labels(&dist_fixture, 2), |_| None);
    if dist.last().map(|r| r.fractions()) != Some([0.25; 4]) {
        failures.push(format!("0/1/2/3 fixture distribution {:?}", dist.last().map(|r| r.fractions())));
    }
    let synthetic = if failures.is_empty() { "synthetic gate, quorum and distribution oracles hold".to_string() } else { failures.join("; ") };

    let Ok(path) = std::env::var("SOCDIM_ANNOTATIONS") else {
        return check(failures.is_empty(), format!("{synthetic}; released-export part skipped (SOCDIM_ANNOTATIONS not set)"));
    };
    let load = match load_annotations(std::path::Path::new(&path)) {
        Ok(l) => l,
        Err(e) => return Fail(e.to_string()),
    };
    let gate = apply_gold_gate(&load.records, 0.4);
    let all = label_distribution(&consensus_labels(&gate.kept, 2), |_| None).pop().expect("all row");
    let percent = all.fractions().map(|f| (f * 100.0).round() / 100.0);
    check(
        failures.is_empty() && percent == RELEASED_DISTRIBUTION,
        format!("{synthetic}; released export all row {percent:?} (target {RELEASED_DISTRIBUTION:?}) over {} sentences", all.sentences),
    )
}

fn planted() -> (Vec<Sentence>, socdim_core::synthetic::PlantedCorpus) {
    let corpus = planted_corpus(&PlantedConfig { seed: 7, ..Default::default() }, &Resources::bundled());
    (corpus.sentences(), corpus)
}

fn c7_planted() -> Outcome {
    let start = Instant::now();
    let (sentences, corpus) = planted();
    let extractor = FeatureExtractor::new(Resources::bundled(), FeatureConfig::default());
    let config = EvalConfig { seed: 11, ..Default::default() };
    let mut worst = (f64::INFINITY, String::new());
    let mut lines = Vec::new();
    let base = base_rows(&extractor, &sentences, Execution::Parallel);
    for d in Dimension::ALL {
        let labels = corpus.labels(d);
        let source = match TextFeatures::with_base(&extractor, d, &sentences, &base, 10, 0.01, Execution::Parallel) {
            Ok(s) => s,
            Err(e) => return Fail(e.to_string()),
        };
        for kind in [ModelKind::Logreg, ModelKind::Gbdt] {
            let t = Instant::now();
            let report = match evaluate(d, kind, &labels, &source, &config) {
                Ok(r) => r,
                Err(e) => return Fail(format!("{d} {kind}: {e}")),
            };
            lines.push(format!("{d}/{kind}={:.3} ({:.1}s)", report.mean, t.elapsed().as_secs_f64()));
            if report.mean < worst.0 {
                worst = (report.mean, format!("{d}/{kind}"));
            }
        }
    }
    let elapsed = start.elapsed();
    eprintln!("{}", lines.join(" "));
    check(
        worst.0 >= PLANTED_MIN_AUC && elapsed <= PLANTED_TIME_LIMIT,
        format!(
            "min mean AUC {:.3} ({}) over 10 dimensions x 2 models, need >= {PLANTED_MIN_AUC}; {:.1}s of {}s",
            worst.0,
            worst.1,
            elapsed.as_secs_f64(),
            PLANTED_TIME_LIMIT.as_secs()
        ),
    )
}
