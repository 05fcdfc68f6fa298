use std::path::{Path, PathBuf};

use serde::Deserialize;
use socdim_core::annotations::{DEFAULT_FAIL_THRESHOLD, DEFAULT_QUORUM};
use socdim_core::corpus::MessageFormat;
use socdim_core::features::FeatureConfig;
use socdim_core::learn::{EvalConfig, GbdtGrid, LogregGrid, ModelKind, DEFAULT_FOLDS};
use socdim_core::Dimension;

use crate::Command;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub threshold: f64,
    pub output_dir: PathBuf,
    pub paths: Paths,
    pub features: Features,
    pub annotations: Annotations,
    pub model: ModelSection,
    pub analytics: Analytics,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            threshold: 0.95,
            output_dir: PathBuf::from("socdim-out"),
            paths: Paths::default(),
            features: Features::default(),
            annotations: Annotations::default(),
            model: ModelSection::default(),
            analytics: Analytics::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusPath {
    pub path: PathBuf,
    pub format: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub corpora: Vec<CorpusPath>,
    /// `sentence_id,text[,labels]` table.
    pub sentences: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    /// Directory with a `manifest.toml`; bundled resources otherwise.
    pub lexicons: Option<PathBuf>,
    /// One `region,value` file per indicator, named after the file stem.
    pub census: Vec<PathBuf>,
    pub geo_map: Option<PathBuf>,
    pub density: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Features {
    pub style: bool,
    pub readability: bool,
    pub lexicon: bool,
    pub sentiment: bool,
    pub ngrams: bool,
    pub top_k: usize,
    pub min_count: usize,
    pub alpha: f64,
}

impl Default for Features {
    fn default() -> Self {
        let f = FeatureConfig::default();
        Features {
            style: f.style,
            readability: f.readability,
            lexicon: f.lexicon,
            sentiment: f.sentiment,
            ngrams: f.ngrams,
            top_k: f.ngram_k,
            min_count: 10,
            alpha: 0.01,
        }
    }
}

impl Features {
    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            style: self.style,
            readability: self.readability,
            lexicon: self.lexicon,
            sentiment: self.sentiment,
            ngrams: self.ngrams,
            ngram_k: self.top_k,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Annotations {
    pub quorum: usize,
    pub fail_threshold: f64,
    pub sub_quorum_as_negative: bool,
    pub min_sentence_len: usize,
    pub max_sentence_len: usize,
}

impl Default for Annotations {
    fn default() -> Self {
        Annotations {
            quorum: DEFAULT_QUORUM,
            fail_threshold: DEFAULT_FAIL_THRESHOLD,
            sub_quorum_as_negative: false,
            min_sentence_len: 6,
            max_sentence_len: 20,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub kinds: Vec<String>,
    pub folds: usize,
    pub embedding_dim: usize,
    pub logreg: LogregGrid,
    pub gbdt: GbdtGrid,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            kinds: vec!["logreg".into(), "gbdt".into()],
            folds: DEFAULT_FOLDS,
            embedding_dim: 300,
            logreg: LogregGrid::default(),
            gbdt: GbdtGrid::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Analytics {
    /// Model kind used by `score`.
    pub model: String,
    /// Empty means all ten.
    pub dimensions: Vec<String>,
    pub min_messages: usize,
    pub min_contributions: usize,
    pub standardize: bool,
    /// Adds a weekly series of messages with positive compound sentiment.
    pub sentiment_baseline: bool,
}

impl Default for Analytics {
    fn default() -> Self {
        Analytics {
            model: "logreg".into(),
            dimensions: Vec::new(),
            min_messages: 20,
            min_contributions: 5,
            standardize: true,
            sentiment_baseline: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, Vec<String>> {
        let text = std::fs::read_to_string(path).map_err(|e| vec![format!("config: cannot read {}: {e}", path.display())])?;
        toml::from_str(&text).map_err(|e| vec![format!("config {}: {}", path.display(), e.to_string().trim_end())])
    }

    pub fn kinds(&self) -> Vec<ModelKind> {
        self.model.kinds.iter().filter_map(|k| k.parse().ok()).collect()
    }

    pub fn score_kind(&self) -> ModelKind {
        self.analytics.model.parse().unwrap_or(ModelKind::Logreg)
    }

    pub fn dimensions(&self) -> Vec<Dimension> {
        if self.analytics.dimensions.is_empty() {
            return Dimension::ALL.to_vec();
        }
        self.analytics.dimensions.iter().filter_map(|d| d.parse().ok()).collect()
    }

    pub fn formats(&self) -> Vec<(PathBuf, MessageFormat)> {
        self.paths.corpora.iter().filter_map(|c| Some((c.path.clone(), c.format.parse().ok()?))).collect()
    }

    pub fn eval_config(&self, exec: socdim_core::par::Execution) -> EvalConfig {
        EvalConfig {
            k: self.model.folds,
            seed: self.seed,
            logreg: self.model.logreg.clone(),
            gbdt: self.model.gbdt.clone(),
            exec,
        }
    }

    /// Every problem at once, each prefixed with its field.
    pub fn validate(&self, command: Command) -> Result<(), Vec<String>> {
        let mut errors = Vec::new();
        let mut err = |field: &str, msg: String| errors.push(format!("{field}: {msg}"));
        let name = command.name();

        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            err("threshold", format!("must lie in (0, 1), got {}", self.threshold));
        }
        if self.output_dir.as_os_str().is_empty() {
            err("output_dir", "must not be empty".into());
        }
        for (i, c) in self.paths.corpora.iter().enumerate() {
            if let Err(e) = c.format.parse::<MessageFormat>() {
                err(&format!("paths.corpora[{i}].format"), e.to_string());
            }
        }
        if self.features.ngrams && self.features.top_k == 0 {
            err("features.top_k", "must be positive when n-grams are enabled".into());
        }
        if self.features.min_count == 0 {
            err("features.min_count", "must be positive".into());
        }
        if !(self.features.alpha > 0.0) {
            err("features.alpha", format!("must be positive, got {}", self.features.alpha));
        }
        if self.annotations.quorum == 0 {
            err("annotations.quorum", "must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.annotations.fail_threshold) {
            err("annotations.fail_threshold", format!("must lie in [0, 1], got {}", self.annotations.fail_threshold));
        }
        if self.annotations.min_sentence_len > self.annotations.max_sentence_len {
            err("annotations.min_sentence_len", "exceeds annotations.max_sentence_len".into());
        }
        if self.model.kinds.is_empty() {
            err("model.kinds", "must list at least one model kind".into());
        }
        for (i, k) in self.model.kinds.iter().enumerate() {
            if let Err(e) = k.parse::<ModelKind>() {
                err(&format!("model.kinds[{i}]"), e.to_string());
            }
        }
        if let Err(e) = self.analytics.model.parse::<ModelKind>() {
            err("analytics.model", e.to_string());
        }
        if self.model.folds < 3 {
            err("model.folds", format!("must be at least 3, got {}", self.model.folds));
        }
        if self.model.embedding_dim == 0 {
            err("model.embedding_dim", "must be positive".into());
        }
        let lg = &self.model.logreg;
        for (field, empty) in [
            ("model.logreg.learning_rate", lg.learning_rate.is_empty()),
            ("model.logreg.l2", lg.l2.is_empty()),
            ("model.logreg.epochs", lg.epochs.is_empty()),
            ("model.gbdt.learning_rate", self.model.gbdt.learning_rate.is_empty()),
            ("model.gbdt.max_depth", self.model.gbdt.max_depth.is_empty()),
            ("model.gbdt.rounds", self.model.gbdt.rounds.is_empty()),
            ("model.gbdt.min_leaf", self.model.gbdt.min_leaf.is_empty()),
        ] {
            if empty {
                err(field, "must not be empty".into());
            }
        }
        if lg.learning_rate.iter().chain(&self.model.gbdt.learning_rate).any(|&r| !(r > 0.0)) {
            err("model.*.learning_rate", "values must be positive".into());
        }
        if lg.l2.iter().any(|&r| !(r >= 0.0)) {
            err("model.logreg.l2", "values must be non-negative".into());
        }
        for (i, d) in self.analytics.dimensions.iter().enumerate() {
            if let Err(e) = d.parse::<Dimension>() {
                err(&format!("analytics.dimensions[{i}]"), e.to_string());
            }
        }
        if self.analytics.min_messages == 0 {
            err("analytics.min_messages", "must be positive".into());
        }

        let uses_embeddings = |kinds: &[ModelKind]| kinds.contains(&ModelKind::EmbeddingDistance);
        let needs: Vec<(&str, bool)> = match command {
            Command::Ingest => vec![("paths.corpora", !self.paths.corpora.is_empty())],
            Command::AnnotateStats => vec![("paths.annotations", self.paths.annotations.is_some())],
            Command::SelectNgrams => vec![("paths.sentences", self.paths.sentences.is_some())],
            Command::Train | Command::Evaluate => vec![
                ("paths.sentences", self.paths.sentences.is_some()),
                ("paths.embeddings", !uses_embeddings(&self.kinds()) || self.paths.embeddings.is_some()),
            ],
            Command::Score => vec![
                ("paths.corpora", !self.paths.corpora.is_empty()),
                ("paths.embeddings", self.score_kind() != ModelKind::EmbeddingDistance || self.paths.embeddings.is_some()),
            ],
            Command::Timeline | Command::Relationships => vec![("paths.corpora", !self.paths.corpora.is_empty())],
            Command::GeoRegress => vec![
                ("paths.corpora", !self.paths.corpora.is_empty()),
                ("paths.geo_map", self.paths.geo_map.is_some()),
                ("paths.census", !self.paths.census.is_empty()),
            ],
            Command::Report => vec![],
        };
        for (field, ok) in needs {
            if !ok {
                err(field, format!("required by `{name}`"));
            }
        }
        let mut files: Vec<(String, &PathBuf)> =
            self.paths.corpora.iter().enumerate().map(|(i, c)| (format!("paths.corpora[{i}].path"), &c.path)).collect();
        for (field, p) in [
            ("paths.sentences", &self.paths.sentences),
            ("paths.annotations", &self.paths.annotations),
            ("paths.embeddings", &self.paths.embeddings),
            ("paths.lexicons", &self.paths.lexicons),
            ("paths.geo_map", &self.paths.geo_map),
            ("paths.density", &self.paths.density),
        ] {
            if let Some(p) = p {
                files.push((field.to_string(), p));
            }
        }
        files.extend(self.paths.census.iter().enumerate().map(|(i, p)| (format!("paths.census[{i}]"), p)));
        for (field, p) in files {
            if !p.exists() {
                err(&field, format!("{} does not exist", p.display()));
            }
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}
