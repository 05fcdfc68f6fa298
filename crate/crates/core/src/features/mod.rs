//! Interpretable sentence features and n-gram selection.

mod ngrams;
mod readability;
mod sentiment;
mod source;
mod style;

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::resources::Resources;
use crate::text::Sentence;

pub use ngrams::{
    select_ngrams, sentence_ngrams, xi, NgramCounter, NgramEntry, NgramParams, NgramVocabulary, DEFAULT_ALPHA, DEFAULT_K,
    DEFAULT_MIN_COUNT,
};
pub use readability::{entropy_bits, readability_features, READABILITY_NAMES};
pub use sentiment::{sentiment_features, sentiment_scores, SentimentScores, SENTIMENT_NAMES};
pub use source::{base_rows, TextFeatures};
pub use style::{style_features, STYLE_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Style,
    Readability,
    Lexicon,
    Sentiment,
    Ngram,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Style => "style",
            Family::Readability => "readability",
            Family::Lexicon => "lexicon",
            Family::Sentiment => "sentiment",
            Family::Ngram => "ngram",
        })
    }
}

/// Which families to compute. Order in the vector is fixed regardless.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub style: bool,
    pub readability: bool,
    pub lexicon: bool,
    pub sentiment: bool,
    pub ngrams: bool,
    pub ngram_k: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { style: true, readability: true, lexicon: true, sentiment: true, ngrams: true, ngram_k: DEFAULT_K }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub names: Vec<String>,
    pub families: Vec<Family>,
    pub id: String,
}

impl FeatureSchema {
    fn build(config: &FeatureConfig, resources: &Resources) -> Self {
        let mut names = Vec::new();
        let mut families = Vec::new();
        let mut push = |family: Family, name: String| {
            names.push(name);
            families.push(family);
        };
        if config.style {
            STYLE_NAMES.iter().for_each(|n| push(Family::Style, format!("style:{n}")));
        }
        if config.readability {
            READABILITY_NAMES.iter().for_each(|n| push(Family::Readability, format!("readability:{n}")));
        }
        if config.lexicon {
            for lex in &resources.lexicons {
                lex.categories.iter().for_each(|c| push(Family::Lexicon, format!("lexicon:{}:{c}", lex.name)));
            }
        }
        if config.sentiment {
            SENTIMENT_NAMES.iter().for_each(|n| push(Family::Sentiment, format!("sentiment:{n}")));
        }
        if config.ngrams {
            (0..config.ngram_k).for_each(|i| push(Family::Ngram, format!("ngram:{i}")));
        }
        let id = schema_id(&names);
        FeatureSchema { names, families, id }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn width(&self, family: Family) -> usize {
        self.families.iter().filter(|&&f| f == family).count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "family", "name"])?;
        for (i, (n, f)) in self.names.iter().zip(&self.families).enumerate() {
            w.write_record([i.to_string(), f.to_string(), n.clone()])?;
        }
        w.flush().map_err(|e| Error::io("schema csv", e))?;
        Ok(())
    }
}

/// Hex SHA-256 of the newline-joined feature names.
pub fn schema_id(names: &[String]) -> String {
    let mut h = Sha256::new();
    for n in names {
        h.update(n.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub schema_id: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    resources: Arc<Resources>,
    config: FeatureConfig,
    schema: FeatureSchema,
}

impl FeatureExtractor {
    pub fn new(resources: Arc<Resources>, config: FeatureConfig) -> Self {
        let schema = FeatureSchema::build(&config, &resources);
        FeatureExtractor { resources, config, schema }
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn resources(&self) -> &Arc<Resources> {
        &self.resources
    }

    /// Checks that a vocabulary fits the configured n-gram block.
    pub fn check_vocab(&self, vocab: Option<&NgramVocabulary>) -> Result<()> {
        let Some(v) = vocab else { return Ok(()) };
        if !self.config.ngrams {
            return Err(Error::SchemaMismatch {
                expected: "no n-gram block".into(),
                found: format!("vocabulary for {}", v.dimension),
            });
        }
        if v.k != self.config.ngram_k || v.entries.len() > v.k {
            return Err(Error::SchemaMismatch {
                expected: format!("n-gram block of {}", self.config.ngram_k),
                found: format!("vocabulary with k={} and {} entries", v.k, v.entries.len()),
            });
        }
        Ok(())
    }

    /// Every family except the n-gram block. A sentence without tokens is
    /// all zeros, including the sentiment block.
    pub fn base_values(&self, sentence: &Sentence) -> Vec<f64> {
        let r = &*self.resources;
        let width = self.schema.len() - self.schema.width(Family::Ngram);
        if sentence.tokens.is_empty() {
            return vec![0.0; width];
        }
        let mut out = Vec::with_capacity(self.schema.len());
        if self.config.style {
            out.extend(style_features(sentence, &r.style));
        }
        if self.config.readability {
            out.extend(readability_features(sentence, &r.dale_chall_easy));
        }
        if self.config.lexicon {
            for lex in &r.lexicons {
                out.extend(lex.match_categories(&sentence.tokens));
            }
        }
        if self.config.sentiment {
            out.extend(sentiment_features(sentence, r));
        }
        for v in &mut out {
            if !v.is_finite() {
                *v = 0.0;
            }
        }
        out
    }

    pub fn ngram_values(&self, sentence: &Sentence, vocab: Option<&NgramVocabulary>) -> Vec<f64> {
        match vocab {
            Some(v) if self.config.ngrams => v.counts(&sentence.tokens),
            _ if self.config.ngrams => vec![0.0; self.config.ngram_k],
            _ => Vec::new(),
        }
    }

    pub fn extract(&self, sentence: &Sentence, vocab: Option<&NgramVocabulary>) -> Result<FeatureVector> {
        self.check_vocab(vocab)?;
        let mut values = self.base_values(sentence);
        values.extend(self.ngram_values(sentence, vocab));
        debug_assert_eq!(values.len(), self.schema.len());
        Ok(FeatureVector { schema_id: self.schema.id.clone(), values })
    }

    pub fn extract_all(
        &self,
        exec: Execution,
        sentences: &[Sentence],
        vocab: Option<&NgramVocabulary>,
    ) -> Result<Vec<FeatureVector>> {
        self.check_vocab(vocab)?;
        par::try_map(exec, sentences, |s| self.extract(s, vocab))
    }
}

/// One-shot convenience over [`FeatureExtractor::extract`].
pub fn assemble_features(
    sentence: &Sentence,
    resources: Arc<Resources>,
    config: &FeatureConfig,
    vocab: Option<&NgramVocabulary>,
) -> Result<FeatureVector> {
    FeatureExtractor::new(resources, config.clone()).extract(sentence, vocab)
}
