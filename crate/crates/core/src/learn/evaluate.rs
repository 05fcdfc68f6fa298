use std::borrow::Cow;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::folds::{derive_seed, make_folds, oversample, Split, DEFAULT_FOLDS};
use super::grid::{grid_search, GbdtGrid, Grid, GridOutcome, LogregGrid, WeightedSplit};
use super::model::{Hyper, Model, ModelKind, ModelParams, TrainingMeta, MODEL_FORMAT_VERSION};
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, NgramVocabulary};
use crate::par::{self, Execution};

/// Feature rows for one training run.
#[derive(Debug, Clone)]
pub struct FoldRows<'a> {
    /// One row per sample, indexed like the labels.
    pub rows: Cow<'a, [Vec<f64>]>,
    pub vocab: Option<NgramVocabulary>,
    pub schema_id: Option<String>,
    pub feature_config: Option<FeatureConfig>,
}

/// Source of feature rows whose content may depend on the training split,
/// such as an n-gram block selected from the training positives only.
pub trait FoldFeatures: Sync {
    fn fold_rows(&self, train_positives: &[usize], train: &[usize]) -> Result<FoldRows<'_>>;
}

/// Fixed rows that do not depend on the split.
impl FoldFeatures for Vec<Vec<f64>> {
    fn fold_rows(&self, _: &[usize], _: &[usize]) -> Result<FoldRows<'_>> {
        Ok(FoldRows { rows: Cow::Borrowed(self.as_slice()), vocab: None, schema_id: None, feature_config: None })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub k: usize,
    pub seed: u64,
    pub logreg: LogregGrid,
    pub gbdt: GbdtGrid,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            k: DEFAULT_FOLDS,
            seed: 0,
            logreg: LogregGrid::default(),
            gbdt: GbdtGrid::default(),
            exec: Execution::default(),
        }
    }
}

impl EvalConfig {
    pub fn grid(&self, kind: ModelKind) -> Result<Grid> {
        match kind {
            ModelKind::Logreg => Ok(Grid::Logreg(self.logreg.clone())),
            ModelKind::Gbdt => Ok(Grid::Gbdt(self.gbdt.clone())),
            ModelKind::EmbeddingDistance => {
                Err(Error::Invalid("embedding-distance models are not trained; use evaluate_scores".into()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub dimension: Dimension,
    pub kind: ModelKind,
    pub fold_auc: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation across folds.
    pub std: f64,
    /// Selected hyperparameters per fold.
    pub hyperparameters: Vec<Hyper>,
}

impl EvaluationReport {
    fn new(dimension: Dimension, kind: ModelKind, fold_auc: Vec<f64>, hyperparameters: Vec<Hyper>) -> Self {
        let n = fold_auc.len() as f64;
        let mean = fold_auc.iter().sum::<f64>() / n;
        let std = if fold_auc.len() > 1 {
            (fold_auc.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        EvaluationReport { dimension, kind, fold_auc, mean, std, hyperparameters }
    }
}

/// `dimension,model,fold,auc,hyperparameters`, one row per fold followed by
/// `mean` and `std` rows per report.
pub fn write_reports_csv<W: Write>(reports: &[EvaluationReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dimension", "model", "fold", "auc", "hyperparameters"])?;
    for r in reports {
        let (d, m) = (r.dimension.name(), r.kind.name());
        for (i, a) in r.fold_auc.iter().enumerate() {
            let h = r.hyperparameters.get(i).map(|h| h.to_string()).unwrap_or_default();
            w.write_record([d, m, &i.to_string(), &format!("{a:.6}"), &h])?;
        }
        w.write_record([d, m, "mean", &format!("{:.6}", r.mean), ""])?;
        w.write_record([d, m, "std", &format!("{:.6}", r.std), ""])?;
    }
    w.flush().map_err(|e| Error::io("evaluation csv", e))?;
    Ok(())
}

fn class_indices(labels: &[bool]) -> (Vec<usize>, Vec<usize>) {
    (0..labels.len()).partition(|&i| labels[i])
}

fn untrainable(dimension: Dimension) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Invalid(message) => Error::Untrainable { dimension, message },
        other => other,
    }
}

fn weighted(split: &Split<usize>, seed: u64) -> Result<WeightedSplit> {
    Ok(WeightedSplit::from_multiset(&oversample(&split.labeled(), seed)?))
}

/// Grid search on one train/tune pair; the winning model is the final model
/// (same data, deterministic training).
fn fit_split(
    kind: ModelKind,
    features: &dyn FoldFeatures,
    config: &EvalConfig,
    train: &Split<usize>,
    tune: &Split<usize>,
    seed: u64,
) -> Result<(GridOutcome, FoldRows<'static>, WeightedSplit)> {
    let mut train_all: Vec<usize> = train.labeled().into_iter().map(|x| x.0).collect();
    train_all.sort_unstable();
    let mut train_pos = train.positives.clone();
    train_pos.sort_unstable();
    let fr = features.fold_rows(&train_pos, &train_all)?;
    let fr = FoldRows { rows: Cow::Owned(fr.rows.into_owned()), ..fr };
    let train_w = weighted(train, derive_seed(seed, 1))?;
    let tune_w = weighted(tune, derive_seed(seed, 2))?;
    let outcome = grid_search(&config.grid(kind)?, &fr.rows, &train_w, &tune_w)?;
    Ok((outcome, fr, train_w))
}

/// Stratified k-fold protocol: per fold, split 80/10/10, oversample each
/// split, grid-search on the tune split, and report test AUC.
pub fn evaluate(
    dimension: Dimension,
    kind: ModelKind,
    labels: &[bool],
    features: &dyn FoldFeatures,
    config: &EvalConfig,
) -> Result<EvaluationReport> {
    let (pos, neg) = class_indices(labels);
    let plan = make_folds(&pos, &neg, config.k, config.seed).map_err(untrainable(dimension))?;
    let fold_ids: Vec<usize> = (0..plan.k).collect();
    let results = par::try_map(config.exec, &fold_ids, |&i| -> Result<(f64, Hyper)> {
        let fold = &plan.folds[i];
        let seed = derive_seed(config.seed, 1 + i as u64);
        let (outcome, fr, _) = fit_split(kind, features, config, &fold.train, &fold.tune, seed)?;
        let test = weighted(&fold.test, derive_seed(seed, 3))?;
        let model = model_from(dimension, outcome.params, &fr, config.seed);
        let scores = test.index.iter().map(|&j| model.predict_row(&fr.rows[j])).collect::<Result<Vec<f64>>>()?;
        Ok((test.auc(&scores)?, outcome.best))
    })
    .map_err(untrainable(dimension))?;
    let (aucs, hypers) = results.into_iter().unzip();
    Ok(EvaluationReport::new(dimension, kind, aucs, hypers))
}

/// The same protocol for a scorer without training, such as the embedding
/// distance baseline: only the oversampled test split of each fold is used.
pub fn evaluate_scores(dimension: Dimension, labels: &[bool], scores: &[f64], config: &EvalConfig) -> Result<EvaluationReport> {
    if scores.len() != labels.len() {
        return Err(Error::Invalid("scores and labels differ in length".into()));
    }
    let (pos, neg) = class_indices(labels);
    let plan = make_folds(&pos, &neg, config.k, config.seed).map_err(untrainable(dimension))?;
    let mut aucs = Vec::with_capacity(plan.k);
    for (i, fold) in plan.folds.iter().enumerate() {
        let seed = derive_seed(config.seed, 1 + i as u64);
        let test = weighted(&fold.test, derive_seed(seed, 3))?;
        let s: Vec<f64> = test.index.iter().map(|&j| scores[j]).collect();
        aucs.push(test.auc(&s)?);
    }
    let hypers = vec![Hyper::None; aucs.len()];
    Ok(EvaluationReport::new(dimension, ModelKind::EmbeddingDistance, aucs, hypers))
}

fn model_from(dimension: Dimension, params: ModelParams, fr: &FoldRows<'_>, seed: u64) -> Model {
    Model {
        format_version: MODEL_FORMAT_VERSION,
        dimension,
        params,
        schema_id: fr.schema_id.clone(),
        feature_config: fr.feature_config.clone(),
        vocab: fr.vocab.clone(),
        meta: TrainingMeta { seed, ..Default::default() },
    }
}

/// Share of each class held out for tuning when training a final model.
pub const FINAL_TUNE_FRACTION: f64 = 0.1;

/// Trains a deployable model on all labeled samples: a stratified random
/// tenth is held out for the grid search, the rest is the training split.
pub fn train_model(
    dimension: Dimension,
    kind: ModelKind,
    labels: &[bool],
    features: &dyn FoldFeatures,
    config: &EvalConfig,
) -> Result<Model> {
    let (mut pos, mut neg) = class_indices(labels);
    if pos.len() < 2 || neg.len() < 2 {
        return Err(Error::Untrainable { dimension, message: "need at least two samples per class".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let cut = |n: usize| ((n as f64 * FINAL_TUNE_FRACTION).round() as usize).clamp(1, n - 1);
    let (np, nn) = (cut(pos.len()), cut(neg.len()));
    let tune = Split { positives: pos[..np].to_vec(), negatives: neg[..nn].to_vec() };
    let train = Split { positives: pos[np..].to_vec(), negatives: neg[nn..].to_vec() };
    let (outcome, fr, _) = fit_split(kind, features, config, &train, &tune, config.seed)
        .map_err(untrainable(dimension))?;
    let mut model = model_from(dimension, outcome.params, &fr, config.seed);
    model.meta.hyperparameters = outcome.best.to_map();
    model.meta.tune_auc = Some(outcome.tune_auc);
    Ok(model)
}
