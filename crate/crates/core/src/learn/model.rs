use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::gbdt::{GbdtHyper, GbdtModel};
use super::logreg::{sigmoid, LogisticModel, LogregHyper, Standardizer};
use crate::dimension::Dimension;
use crate::embeddings::{distance_score, pseudo_confidence, DimensionAnchor, EmbeddingStore};
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureExtractor, FeatureVector, NgramVocabulary};
use crate::resources::Resources;
use crate::text::Sentence;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Logreg,
    Gbdt,
    EmbeddingDistance,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Logreg => "logreg",
            ModelKind::Gbdt => "gbdt",
            ModelKind::EmbeddingDistance => "embedding_distance",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "logreg" => Ok(ModelKind::Logreg),
            "gbdt" => Ok(ModelKind::Gbdt),
            "embedding_distance" | "embedding" => Ok(ModelKind::EmbeddingDistance),
            _ => Err(Error::Invalid(format!("unknown model kind `{s}` (expected logreg, gbdt or embedding_distance)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hyper {
    Logreg(LogregHyper),
    Gbdt(GbdtHyper),
    None,
}

impl Hyper {
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match self {
            Hyper::Logreg(h) => {
                m.insert("learning_rate".into(), h.learning_rate);
                m.insert("l2".into(), h.l2);
                m.insert("epochs".into(), h.epochs as f64);
            }
            Hyper::Gbdt(h) => {
                m.insert("learning_rate".into(), h.learning_rate);
                m.insert("max_depth".into(), h.max_depth as f64);
                m.insert("rounds".into(), h.rounds as f64);
                m.insert("min_leaf".into(), h.min_leaf as f64);
            }
            Hyper::None => {}
        }
        m
    }
}

impl fmt::Display for Hyper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_map().iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(";"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Logreg { model: LogisticModel, standardizer: Standardizer },
    Gbdt { model: GbdtModel },
    EmbeddingDistance { anchor: DimensionAnchor },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub hyperparameters: BTreeMap<String, f64>,
    pub fold: Option<usize>,
    pub tune_auc: Option<f64>,
}

/// A trained per-dimension scorer, persisted as self-describing JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub format_version: u32,
    pub dimension: Dimension,
    pub params: ModelParams,
    /// Feature schema the model was trained on (feature models only).
    pub schema_id: Option<String>,
    pub feature_config: Option<FeatureConfig>,
    pub vocab: Option<NgramVocabulary>,
    pub meta: TrainingMeta,
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self.params {
            ModelParams::Logreg { .. } => ModelKind::Logreg,
            ModelParams::Gbdt { .. } => ModelKind::Gbdt,
            ModelParams::EmbeddingDistance { .. } => ModelKind::EmbeddingDistance,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Model> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: Model = serde_json::from_str(&text)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "{}: unsupported model format version {}",
                path.display(),
                model.format_version
            )));
        }
        Ok(model)
    }

    /// Probability from a raw feature row. No schema check.
    pub fn predict_row(&self, row: &[f64]) -> Result<f64> {
        match &self.params {
            ModelParams::Logreg { model, standardizer } => {
                if row.len() != model.weights.len() {
                    return Err(Error::SchemaMismatch {
                        expected: format!("{} features", model.weights.len()),
                        found: format!("{} features", row.len()),
                    });
                }
                Ok(sigmoid(model.margin_raw(row, standardizer)))
            }
            ModelParams::Gbdt { model } => Ok(model.predict(row)),
            ModelParams::EmbeddingDistance { .. } => {
                Err(Error::Invalid("embedding-distance models score sentences, not feature rows".into()))
            }
        }
    }

    pub fn predict_features(&self, features: &FeatureVector) -> Result<f64> {
        if let Some(id) = &self.schema_id {
            if *id != features.schema_id {
                return Err(Error::SchemaMismatch { expected: id.clone(), found: features.schema_id.clone() });
            }
        }
        self.predict_row(&features.values)
    }
}

pub enum PredictInput<'a> {
    Features(&'a FeatureVector),
    Sentence { sentence: &'a Sentence, resources: Arc<Resources>, store: Option<&'a EmbeddingStore> },
}

/// Confidence in [0, 1] that the input expresses the model's dimension.
pub fn predict(model: &Model, input: PredictInput<'_>) -> Result<f64> {
    match input {
        PredictInput::Features(f) => model.predict_features(f),
        PredictInput::Sentence { sentence, resources, store } => {
            ModelScorer::new(model.clone(), resources, store.map(|s| Arc::new(s.clone())))?.score(sentence)
        }
    }
}

/// A model bundled with what it needs to score raw sentences.
#[derive(Debug, Clone)]
pub struct ModelScorer {
    pub model: Model,
    extractor: Option<FeatureExtractor>,
    store: Option<Arc<EmbeddingStore>>,
}

impl ModelScorer {
    pub fn new(model: Model, resources: Arc<Resources>, store: Option<Arc<EmbeddingStore>>) -> Result<Self> {
        let extractor = match model.kind() {
            ModelKind::EmbeddingDistance => {
                if store.is_none() {
                    return Err(Error::Invalid("an embedding-distance model needs an embedding store".into()));
                }
                None
            }
            _ => {
                let config = model.feature_config.clone().unwrap_or_default();
                let ex = FeatureExtractor::new(resources, config);
                ex.check_vocab(model.vocab.as_ref())?;
                if let Some(id) = &model.schema_id {
                    if *id != ex.schema().id {
                        return Err(Error::SchemaMismatch { expected: id.clone(), found: ex.schema().id.clone() });
                    }
                }
                Some(ex)
            }
        };
        Ok(ModelScorer { model, extractor, store })
    }

    pub fn dimension(&self) -> Dimension {
        self.model.dimension
    }

    pub fn score(&self, sentence: &Sentence) -> Result<f64> {
        match (&self.model.params, &self.extractor, &self.store) {
            (ModelParams::EmbeddingDistance { anchor }, _, Some(store)) => {
                Ok(pseudo_confidence(distance_score(sentence, anchor, store)?))
            }
            (_, Some(ex), _) => self.model.predict_features(&ex.extract(sentence, self.model.vocab.as_ref())?),
            _ => unreachable!("checked in ModelScorer::new"),
        }
    }
}
