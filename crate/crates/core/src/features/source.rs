use std::borrow::Cow;

use super::{select_ngrams, FeatureExtractor, NgramParams};
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::learn::{FoldFeatures, FoldRows};
use crate::par::{self, Execution};
use crate::text::{Sentence, Token};

/// Sentence features for cross-validation. The fixed families are computed
/// once; the n-gram block is rebuilt per split from the training sentences
/// so that no held-out text shapes the vocabulary.
pub struct TextFeatures<'a> {
    extractor: &'a FeatureExtractor,
    dimension: Dimension,
    sentences: &'a [Sentence],
    base: Cow<'a, [Vec<f64>]>,
    params: NgramParams,
    exec: Execution,
}

impl<'a> TextFeatures<'a> {
    pub fn new(
        extractor: &'a FeatureExtractor,
        dimension: Dimension,
        sentences: &'a [Sentence],
        min_count: usize,
        alpha: f64,
        exec: Execution,
    ) -> Self {
        let base = base_rows(extractor, sentences, exec);
        Self::build(extractor, dimension, sentences, Cow::Owned(base), min_count, alpha, exec)
    }

    /// Reuses rows from [`base_rows`], which do not depend on the dimension.
    pub fn with_base(
        extractor: &'a FeatureExtractor,
        dimension: Dimension,
        sentences: &'a [Sentence],
        base: &'a [Vec<f64>],
        min_count: usize,
        alpha: f64,
        exec: Execution,
    ) -> Result<Self> {
        if base.len() != sentences.len() {
            return Err(Error::Invalid(format!("{} base rows for {} sentences", base.len(), sentences.len())));
        }
        Ok(Self::build(extractor, dimension, sentences, Cow::Borrowed(base), min_count, alpha, exec))
    }

    fn build(
        extractor: &'a FeatureExtractor,
        dimension: Dimension,
        sentences: &'a [Sentence],
        base: Cow<'a, [Vec<f64>]>,
        min_count: usize,
        alpha: f64,
        exec: Execution,
    ) -> Self {
        let params = NgramParams { min_count, k: extractor.config().ngram_k, alpha };
        TextFeatures { extractor, dimension, sentences, base, params, exec }
    }
}

/// Every feature family except n-grams, one row per sentence.
pub fn base_rows(extractor: &FeatureExtractor, sentences: &[Sentence], exec: Execution) -> Vec<Vec<f64>> {
    par::map(exec, sentences, |s| extractor.base_values(s))
}

impl FoldFeatures for TextFeatures<'_> {
    fn fold_rows(&self, train_positives: &[usize], train: &[usize]) -> Result<FoldRows<'_>> {
        let config = self.extractor.config();
        let vocab = if config.ngrams {
            let tokens = |ids: &[usize]| -> Vec<&[Token]> { ids.iter().map(|&i| self.sentences[i].tokens.as_slice()).collect() };
            let v = select_ngrams(
                self.dimension,
                &tokens(train_positives),
                &tokens(train),
                self.params,
                Execution::Sequential,
            )?;
            Some(v)
        } else {
            None
        };
        let counter = vocab.as_ref().map(|v| v.counter());
        let rows = par::map(self.exec, &(0..self.sentences.len()).collect::<Vec<_>>(), |&i| {
            let mut row = self.base[i].clone();
            match &counter {
                Some(c) => row.extend(c.counts(&self.sentences[i].tokens)),
                None => row.extend(self.extractor.ngram_values(&self.sentences[i], None)),
            }
            row
        });
        Ok(FoldRows {
            rows: Cow::Owned(rows),
            vocab,
            schema_id: Some(self.extractor.schema().id.clone()),
            feature_config: Some(config.clone()),
        })
    }
}
