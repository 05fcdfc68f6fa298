use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _, Result};
use socdim_core::analytics::{
    label_messages, ols_regress, relationship_labels, state_prevalence, timeline, timeline_by, write_labelings_csv,
    write_regression_csv, write_timeline_csv, Abstain, RelationshipOutcome, TextLabeling,
};
use socdim_core::annotations::{
    agreement_stats, apply_gold_gate, build_training_sets, consensus_labels, label_distribution, write_consensus_csv,
    TrainingSetOptions, TrainingSets,
};
use socdim_core::corpus::{
    georeference_users, labeled_training_sets, load_annotations, load_group_regions, load_messages,
    load_region_values, load_sentence_table, write_messages_jsonl, Message,
};
use socdim_core::embeddings::{anchor_vector, distance_score, load_embeddings_filtered, pseudo_confidence, EmbeddingStore};
use socdim_core::features::{select_ngrams, sentiment_scores, FeatureExtractor, NgramParams, TextFeatures};
use socdim_core::learn::{
    evaluate, evaluate_scores, train_model, write_reports_csv, EvaluationReport, Model, ModelKind, ModelParams,
    ModelScorer, TrainingMeta, MODEL_FORMAT_VERSION,
};
use socdim_core::par::Execution;
use socdim_core::text::{build_passages_with, tokenize, Sentence};
use socdim_core::{Dimension, Error, Resources};

use crate::config::RunConfig;
use crate::output::{csv_reader, Artifacts};

pub struct Context {
    pub cfg: RunConfig,
    pub exec: Execution,
    pub resources: Arc<Resources>,
}

impl Context {
    pub fn new(cfg: RunConfig, exec: Execution) -> Result<Self> {
        let resources = match &cfg.paths.lexicons {
            Some(dir) => Arc::new(Resources::load_dir(dir)?),
            None => Resources::bundled(),
        };
        Ok(Context { cfg, exec, resources })
    }

    fn artifacts(&self) -> Result<Artifacts> {
        Artifacts::new(&self.cfg.output_dir, self.cfg.seed)
    }

    fn output(&self, name: &str) -> PathBuf {
        self.cfg.output_dir.join(name)
    }

    fn messages(&self) -> Result<Vec<Message>> {
        let mut all = Vec::new();
        for (path, format) in self.cfg.formats() {
            all.extend(load_messages(&path, format)?.messages);
        }
        Ok(all)
    }

    fn store(&self, words: HashSet<String>) -> Result<Arc<EmbeddingStore>> {
        let path = self.cfg.paths.embeddings.as_ref().ok_or_else(|| anyhow!("paths.embeddings is not set"))?;
        let mut words = words;
        words.extend(self.resources.anchors.values().flatten().cloned());
        let store = load_embeddings_filtered(path, self.cfg.model.embedding_dim, Some(&words))?;
        Ok(Arc::new(store))
    }

    fn model_path(&self, d: Dimension, kind: ModelKind) -> String {
        format!("models/{}.{}.json", d.name(), kind.name())
    }
}

fn sentence_words(sentences: &[Sentence]) -> HashSet<String> {
    sentences.iter().flat_map(|s| s.tokens.iter().map(|t| t.surface.clone())).collect()
}

/// Sentences with training sets, from a labeled table or from the table
/// plus crowd annotations.
struct Labeled {
    index: HashMap<String, usize>,
    sentences: Vec<Sentence>,
    sets: TrainingSets,
}

impl Labeled {
    fn load(ctx: &Context) -> Result<Self> {
        let cfg = &ctx.cfg;
        let path = cfg.paths.sentences.as_ref().ok_or_else(|| anyhow!("paths.sentences is not set"))?;
        let rows = load_sentence_table(path)?;
        let sets = match &cfg.paths.annotations {
            Some(ann) => {
                let load = load_annotations(ann)?;
                let gate = apply_gold_gate(&load.records, cfg.annotations.fail_threshold);
                let consensus = consensus_labels(&gate.kept, cfg.annotations.quorum);
                let options = TrainingSetOptions { sub_quorum_as_negative: cfg.annotations.sub_quorum_as_negative };
                build_training_sets(&consensus, options)
            }
            None => labeled_training_sets(&rows)?,
        };
        let index = rows.iter().enumerate().map(|(i, r)| (r.id.clone(), i)).collect();
        let sentences = rows.iter().map(|r| Sentence::from_text(&r.text)).collect();
        Ok(Labeled { index, sentences, sets })
    }

    /// Positives first, then negatives.
    fn subset(&self, d: Dimension) -> Result<(Vec<Sentence>, Vec<bool>)> {
        let set = self.sets.get(d);
        let mut sentences = Vec::with_capacity(set.positives.len() + set.negatives.len());
        for id in set.positives.iter().chain(&set.negatives) {
            let i = self.index.get(id).ok_or_else(|| anyhow!("annotated sentence `{id}` is not in paths.sentences"))?;
            sentences.push(self.sentences[*i].clone());
        }
        let labels = (0..sentences.len()).map(|i| i < set.positives.len()).collect();
        Ok((sentences, labels))
    }
}

fn csv_writer(w: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::Writer::from_writer(w)
}

pub fn ingest(ctx: &Context) -> Result<Artifacts> {
    let cfg = &ctx.cfg;
    let mut out = ctx.artifacts()?;
    let mut messages = Vec::new();
    let mut summary = Vec::new();
    for (path, format) in cfg.formats() {
        let report = load_messages(&path, format)?;
        summary.push((path, format, report.records, report.skipped, report.messages.len()));
        messages.extend(report.messages);
    }
    out.csv("ingest_summary.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["path", "format", "records", "skipped", "messages"])?;
        for (p, f, r, s, m) in &summary {
            c.write_record([p.display().to_string(), f.to_string(), r.to_string(), s.to_string(), m.to_string()])?;
        }
        Ok(c.flush()?)
    })?;
    let path = out.path("messages.jsonl");
    out.adopt(path.clone());
    write_messages_jsonl(&path, &messages)?;
    let (min, max) = (cfg.annotations.min_sentence_len, cfg.annotations.max_sentence_len);
    out.csv("passages.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["sentence_id", "message_id", "before", "target", "after"])?;
        for m in &messages {
            for p in build_passages_with(&m.text, min, max, &ctx.resources.text) {
                let text = |s: &Option<Sentence>| s.as_ref().map(|s| s.text.clone()).unwrap_or_default();
                let id = format!("{}:{}", m.id, p.target.index_in_text);
                c.write_record([id, m.id.clone(), text(&p.before), p.target.text.clone(), text(&p.after)])?;
            }
        }
        Ok(c.flush()?)
    })?;
    eprintln!("ingested {} messages", messages.len());
    Ok(out)
}

pub fn annotate_stats(ctx: &Context) -> Result<Artifacts> {
    let cfg = &ctx.cfg;
    let path = cfg.paths.annotations.as_ref().ok_or_else(|| anyhow!("paths.annotations is not set"))?;
    let load = load_annotations(path)?;
    let gate = apply_gold_gate(&load.records, cfg.annotations.fail_threshold);
    let consensus = consensus_labels(&gate.kept, cfg.annotations.quorum);
    let options = TrainingSetOptions { sub_quorum_as_negative: cfg.annotations.sub_quorum_as_negative };
    let sets = build_training_sets(&consensus, options);
    let agreement = agreement_stats(&gate.kept);
    let dist = label_distribution(&consensus, |_| None);

    let mut out = ctx.artifacts()?;
    out.csv("gold_scores.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["annotator_id", "failed", "total", "banned"])?;
        for (a, s) in &gate.gold_scores {
            let banned = if gate.banned.contains(a) { "1" } else { "0" };
            c.write_record([a.as_str(), &s.failed.to_string(), &s.total.to_string(), banned])?;
        }
        Ok(c.flush()?)
    })?;
    out.csv("consensus.csv", |w| Ok(write_consensus_csv(&consensus, w)?))?;
    out.csv("distribution.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["source", "sentences", "none", "one", "two", "three_or_more"])?;
        for r in &dist {
            let mut row = vec![r.source.clone(), r.sentences.to_string()];
            row.extend(r.fractions().iter().map(|f| format!("{f:.6}")));
            c.write_record(row)?;
        }
        Ok(c.flush()?)
    })?;
    out.csv("agreement.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["dimension", "kappa", "pairs", "excluded"])?;
        let fmt = |k: Option<f64>| k.map(|k| format!("{k:.6}")).unwrap_or_default();
        for a in &agreement.per_dimension {
            c.write_record([a.dimension.name(), &fmt(a.kappa), &a.pairs.to_string(), &a.excluded.to_string()])?;
        }
        c.write_record(["macro", &fmt(agreement.macro_kappa), "", ""])?;
        Ok(c.flush()?)
    })?;
    out.csv("training_sets.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["dimension", "positives", "negatives"])?;
        for d in Dimension::ALL {
            let s = sets.get(d);
            c.write_record([d.name(), &s.positives.len().to_string(), &s.negatives.len().to_string()])?;
        }
        Ok(c.flush()?)
    })?;
    eprintln!(
        "{} records ({} rejected rows), {} annotators banned, {} consensus sentences",
        load.records.len(),
        load.rejected.len(),
        gate.banned.len(),
        consensus.len()
    );
    Ok(out)
}

pub fn select(ctx: &Context) -> Result<Artifacts> {
    let cfg = &ctx.cfg;
    let labeled = Labeled::load(ctx)?;
    let extractor = FeatureExtractor::new(ctx.resources.clone(), cfg.features.feature_config());
    let params = NgramParams { min_count: cfg.features.min_count, k: cfg.features.top_k, alpha: cfg.features.alpha };
    let mut out = ctx.artifacts()?;
    out.csv("feature_schema.csv", |w| Ok(extractor.schema().write_csv(w)?))?;
    for d in cfg.dimensions() {
        let (sentences, labels) = labeled.subset(d)?;
        let all: Vec<&[_]> = sentences.iter().map(|s| s.tokens.as_slice()).collect();
        let pos: Vec<&[_]> = all.iter().zip(&labels).filter(|(_, &l)| l).map(|(t, _)| *t).collect();
        let vocab = select_ngrams(d, &pos, &all, params, ctx.exec)?;
        out.csv(&format!("vocab/{}.csv", d.name()), |w| Ok(vocab.write_csv(w)?))?;
    }
    Ok(out)
}

fn embedding_model(ctx: &Context, d: Dimension, store: &EmbeddingStore) -> Result<Model> {
    Ok(Model {
        format_version: MODEL_FORMAT_VERSION,
        dimension: d,
        params: ModelParams::EmbeddingDistance { anchor: anchor_vector(d, store, &ctx.resources)? },
        schema_id: None,
        feature_config: None,
        vocab: None,
        meta: TrainingMeta { seed: ctx.cfg.seed, ..Default::default() },
    })
}

/// Skip a dimension that lacks data instead of failing the whole run.
fn skippable(e: &Error) -> bool {
    matches!(e, Error::Untrainable { .. })
}

pub fn train(ctx: &Context) -> Result<Artifacts> {
    let cfg = &ctx.cfg;
    let labeled = Labeled::load(ctx)?;
    let kinds = cfg.kinds();
    let store = if kinds.contains(&ModelKind::EmbeddingDistance) { Some(ctx.store(sentence_words(&labeled.sentences))?) } else { None };
    let extractor = FeatureExtractor::new(ctx.resources.clone(), cfg.features.feature_config());
    let config = cfg.eval_config(ctx.exec);
    let mut out = ctx.artifacts()?;
    let mut summary = Vec::new();
    for d in cfg.dimensions() {
        let (sentences, labels) = labeled.subset(d)?;
        let source = TextFeatures::new(&extractor, d, &sentences, cfg.features.min_count, cfg.features.alpha, ctx.exec);
        for &kind in &kinds {
            let model = match kind {
                ModelKind::EmbeddingDistance => embedding_model(ctx, d, store.as_deref().expect("loaded above"))?,
                _ => match train_model(d, kind, &labels, &source, &config) {
                    Ok(m) => m,
                    Err(e) if skippable(&e) => {
                        eprintln!("warning: skipping {d} {kind}: {e}");
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                },
            };
            out.json(&ctx.model_path(d, kind), &model)?;
            let positives = labels.iter().filter(|&&l| l).count();
            let hyper: Vec<String> = model.meta.hyperparameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            summary.push((d, kind, positives, labels.len() - positives, model.meta.tune_auc, hyper.join(";")));
        }
    }
    if summary.is_empty() {
        bail!("no dimension could be trained");
    }
    out.csv("training_summary.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["dimension", "model", "positives", "negatives", "tune_auc", "hyperparameters"])?;
        for (d, k, p, n, auc, h) in &summary {
            let auc = auc.map(|a| format!("{a:.6}")).unwrap_or_default();
            c.write_record([d.name(), k.name(), &p.to_string(), &n.to_string(), &auc, h])?;
        }
        Ok(c.flush()?)
    })?;
    Ok(out)
}

pub fn run_evaluate(ctx: &Context) -> Result<Artifacts> {
    let cfg = &ctx.cfg;
    let labeled = Labeled::load(ctx)?;
    let kinds = cfg.kinds();
    let store = if kinds.contains(&ModelKind::EmbeddingDistance) { Some(ctx.store(sentence_words(&labeled.sentences))?) } else { None };
    let extractor = FeatureExtractor::new(ctx.resources.clone(), cfg.features.feature_config());
    let config = cfg.eval_config(ctx.exec);
    let mut reports: Vec<EvaluationReport> = Vec::new();
    for d in cfg.dimensions() {
        let (sentences, labels) = labeled.subset(d)?;
        let source = TextFeatures::new(&extractor, d, &sentences, cfg.features.min_count, cfg.features.alpha, ctx.exec);
        for &kind in &kinds {
            let report = match kind {
                ModelKind::EmbeddingDistance => {
                    let store = store.as_deref().expect("loaded above");
                    let anchor = anchor_vector(d, store, &ctx.resources)?;
                    // Sentences without any embedded word rank lowest.
                    let scores: Vec<f64> =
                        sentences.iter().map(|s| distance_score(s, &anchor, store).map(pseudo_confidence).unwrap_or(0.0)).collect();
                    evaluate_scores(d, &labels, &scores, &config)
                }
                _ => evaluate(d, kind, &labels, &source, &config),
            };
            match report {
                Ok(r) => {
                    eprintln!("{d:<11} {kind:<18} mean AUC {:.3} (sd {:.3})", r.mean, r.std);
                    reports.push(r);
                }
                Err(e) if skippable(&e) => eprintln!("warning: skipping {d} {kind}: {e}"),
                Err(e) => return Err(e.into()),
            }
        }
    }
    if reports.is_empty() {
        bail!("no dimension could be evaluated");
    }
    let mut out = ctx.artifacts()?;
    out.csv("evaluation.csv", |w| Ok(write_reports_csv(&reports, w)?))?;
    Ok(out)
}

pub fn score(ctx: &Context) -> Result<Artifacts> {
    let cfg = &ctx.cfg;
    let messages = ctx.messages()?;
    let kind = cfg.score_kind();
    let store = if kind == ModelKind::EmbeddingDistance {
        Some(ctx.store(messages.iter().flat_map(|m| tokenize(&m.text)).map(|t| t.surface).collect())?)
    } else {
        None
    };
    let mut scorers = Vec::new();
    for d in cfg.dimensions() {
        let path = ctx.output(&ctx.model_path(d, kind));
        if !path.exists() {
            bail!("{} not found; run `train` with model.kinds including \"{kind}\" first", path.display());
        }
        let model = Model::load(&path)?;
        if model.dimension != d || model.kind() != kind {
            bail!("{}: holds a {} {} model", path.display(), model.dimension, model.kind());
        }
        scorers.push(ModelScorer::new(model, ctx.resources.clone(), store.clone())?);
    }
    let labelings = label_messages(ctx.exec, &messages, &scorers, &ctx.resources.text, cfg.threshold)?;
    let mut out = ctx.artifacts()?;
    out.csv("labelings.csv", |w| Ok(write_labelings_csv(&labelings, w)?))?;
    let labeled = labelings.iter().filter(|l| !l.labeled.is_empty()).count();
    eprintln!("scored {} messages, {labeled} labeled with some dimension", messages.len());
    Ok(out)
}

/// Labelings written by `score`, one per message; messages without rows were
/// unscoreable.
fn read_labelings(ctx: &Context, messages: &[Message]) -> Result<Vec<TextLabeling>> {
    let path = ctx.output("labelings.csv");
    if !path.exists() {
        bail!("{} not found; run `score` first", path.display());
    }
    let mut rows: HashMap<String, TextLabeling> = HashMap::new();
    for (i, rec) in csv_reader(&path)?.records().enumerate() {
        let rec = rec?;
        let bad = || anyhow!("{} row {}: expected message_id,dimension,max_score,labeled", path.display(), i + 1);
        if rec.len() != 4 {
            return Err(bad());
        }
        let d: Dimension = rec[1].parse()?;
        let s: f64 = rec[2].parse().map_err(|_| bad())?;
        let l = rows.entry(rec[0].to_string()).or_insert_with(|| TextLabeling {
            message_id: rec[0].to_string(),
            max_scores: BTreeMap::new(),
            labeled: BTreeSet::new(),
            unscoreable: false,
        });
        l.max_scores.insert(d, s);
        match &rec[3] {
            "1" => {
                l.labeled.insert(d);
            }
            "0" => {}
            _ => return Err(bad()),
        }
    }
    Ok(messages
        .iter()
        .map(|m| {
            rows.remove(&m.id).unwrap_or_else(|| TextLabeling {
                message_id: m.id.clone(),
                max_scores: BTreeMap::new(),
                labeled: BTreeSet::new(),
                unscoreable: true,
            })
        })
        .collect())
}

pub fn run_timeline(ctx: &Context) -> Result<Artifacts> {
    let messages = ctx.messages()?;
    let labelings = read_labelings(ctx, &messages)?;
    let mut series = Vec::new();
    for d in ctx.cfg.dimensions() {
        series.push(timeline(&messages, &labelings, d)?);
    }
    if ctx.cfg.analytics.sentiment_baseline {
        series.push(timeline_by("sentiment", &messages, |m| sentiment_scores(&m.text, &ctx.resources).compound > 0.0)?);
    }
    let mut out = ctx.artifacts()?;
    out.csv("timeline.csv", |w| Ok(write_timeline_csv(&series, w)?))?;
    out.csv("timeline_summary.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["series", "weeks", "degenerate", "untimed"])?;
        for s in &series {
            let flag = if s.degenerate { "1" } else { "0" };
            c.write_record([s.label.as_str(), &s.buckets.len().to_string(), flag, &s.untimed.to_string()])?;
        }
        Ok(c.flush()?)
    })?;
    Ok(out)
}

pub fn relationships(ctx: &Context) -> Result<Artifacts> {
    let messages = ctx.messages()?;
    let labelings = read_labelings(ctx, &messages)?;
    let outcomes = relationship_labels(&messages, &labelings, ctx.cfg.analytics.min_messages);
    let mut out = ctx.artifacts()?;
    out.csv("relationships.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["user_a", "user_b", "dimension", "count", "mean_max_score", "abstain"])?;
        for ((a, b), o) in &outcomes {
            let row = match o {
                RelationshipOutcome::Label { dimension, count, mean_max_score } => {
                    [dimension.name().to_string(), count.to_string(), format!("{mean_max_score:.6}"), String::new()]
                }
                RelationshipOutcome::Abstain(Abstain::TooFewMessages { messages, required }) => {
                    [String::new(), String::new(), String::new(), format!("too_few_messages ({messages} < {required})")]
                }
                RelationshipOutcome::Abstain(Abstain::NoLabels) => {
                    [String::new(), String::new(), String::new(), "no_labels".into()]
                }
            };
            c.write_record([a.as_str(), b.as_str()].into_iter().chain(row.iter().map(String::as_str)))?;
        }
        Ok(c.flush()?)
    })?;
    Ok(out)
}

fn indicator_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

pub fn geo_regress(ctx: &Context) -> Result<Artifacts> {
    let cfg = &ctx.cfg;
    let messages = ctx.messages()?;
    let labelings = read_labelings(ctx, &messages)?;
    let groups = load_group_regions(cfg.paths.geo_map.as_ref().expect("validated"))?;
    let geo = georeference_users(&messages, &groups, cfg.analytics.min_contributions);
    let prevalence: Vec<(String, BTreeMap<String, f64>)> = cfg
        .dimensions()
        .into_iter()
        .map(|d| (d.name().to_string(), state_prevalence(&messages, &labelings, &geo.user_to_region, d)))
        .collect();
    let mut predictors = prevalence.clone();
    if let Some(p) = &cfg.paths.density {
        predictors.push(("population_density".into(), load_region_values(p)?));
    }
    let mut results = Vec::new();
    for path in &cfg.paths.census {
        let name = indicator_name(path);
        let outcome = load_region_values(path)?;
        results.push(ols_regress(&name, &outcome, &predictors, cfg.analytics.standardize).with_context(|| format!("regressing {name}"))?);
    }
    let mut out = ctx.artifacts()?;
    out.csv("prevalence.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["region", "dimension", "prevalence"])?;
        for (d, m) in &prevalence {
            for (r, v) in m {
                c.write_record([r.as_str(), d.as_str(), &format!("{v:.6}")])?;
            }
        }
        Ok(c.flush()?)
    })?;
    out.csv("regression.csv", |w| Ok(write_regression_csv(&results, w)?))?;
    eprintln!("{} georeferenced users, {} regressions", geo.user_to_region.len(), results.len());
    Ok(out)
}

/// Mean AUC per dimension (rows) and model kind (columns) from `evaluate`.
pub fn report(ctx: &Context) -> Result<Artifacts> {
    let path = ctx.output("evaluation.csv");
    if !path.exists() {
        bail!("{} not found; run `evaluate` first", path.display());
    }
    let mut means: BTreeMap<(Dimension, ModelKind), f64> = BTreeMap::new();
    for rec in csv_reader(&path)?.records() {
        let rec = rec?;
        if rec.get(2) == Some("mean") {
            let auc: f64 = rec[3].parse().with_context(|| format!("{}: bad auc `{}`", path.display(), &rec[3]))?;
            means.insert((rec[0].parse()?, rec[1].parse()?), auc);
        }
    }
    let kinds: Vec<ModelKind> = [ModelKind::Logreg, ModelKind::Gbdt, ModelKind::EmbeddingDistance]
        .into_iter()
        .filter(|k| means.keys().any(|(_, mk)| mk == k))
        .collect();
    let dims: Vec<Dimension> = Dimension::ALL.into_iter().filter(|d| means.keys().any(|(md, _)| md == d)).collect();
    let cell = |d: Dimension, k: ModelKind| means.get(&(d, k)).map(|a| format!("{a:.3}")).unwrap_or_default();
    let mut out = ctx.artifacts()?;
    out.csv("report.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(std::iter::once("dimension").chain(kinds.iter().map(|k| k.name())))?;
        for &d in &dims {
            c.write_record(std::iter::once(d.name().to_string()).chain(kinds.iter().map(|&k| cell(d, k))))?;
        }
        Ok(c.flush()?)
    })?;
    print!("{:<12}", "dimension");
    for k in &kinds {
        print!("{:>20}", k.name());
    }
    println!();
    for &d in &dims {
        print!("{:<12}", d.name());
        for &k in &kinds {
            print!("{:>20}", cell(d, k));
        }
        println!();
    }
    Ok(out)
}
