use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::text::Token;

pub const DEFAULT_MIN_COUNT: usize = 10;
pub const DEFAULT_K: usize = 100;
pub const DEFAULT_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NgramParams {
    pub min_count: usize,
    pub k: usize,
    pub alpha: f64,
}

impl Default for NgramParams {
    fn default() -> Self {
        NgramParams { min_count: DEFAULT_MIN_COUNT, k: DEFAULT_K, alpha: DEFAULT_ALPHA }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramEntry {
    /// Space-joined unigram or bigram.
    pub ngram: String,
    pub xi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramVocabulary {
    pub dimension: Dimension,
    pub entries: Vec<NgramEntry>,
    pub min_count: usize,
    pub k: usize,
}

/// Unigrams and bigrams over word-like tokens. Any other token between two
/// words breaks the bigram.
pub fn sentence_ngrams(tokens: &[Token]) -> Vec<String> {
    let mut out = Vec::new();
    let mut prev: Option<&str> = None;
    for t in tokens {
        if t.is_wordlike() {
            out.push(t.surface.clone());
            if let Some(p) = prev {
                out.push(format!("{p} {}", t.surface));
            }
            prev = Some(&t.surface);
        } else {
            prev = None;
        }
    }
    out
}

type Counts = HashMap<String, usize>;

fn count_all(exec: Execution, sentences: &[&[Token]]) -> Counts {
    let chunk = (sentences.len() / 64).max(256);
    let chunks: Vec<&[&[Token]]> = sentences.chunks(chunk).collect();
    let partials = par::map(exec, &chunks, |c| {
        let mut m = Counts::new();
        for s in c.iter() {
            for g in sentence_ngrams(s) {
                *m.entry(g).or_default() += 1;
            }
        }
        m
    });
    let mut total = Counts::new();
    for m in partials {
        for (g, n) in m {
            *total.entry(g).or_default() += n;
        }
    }
    total
}

/// Log ratio of the smoothed n-gram probability in the positives to that in
/// the whole corpus.
pub fn xi(c_pos: usize, n_pos: usize, c_all: usize, n_all: usize, vocab: usize, alpha: f64) -> f64 {
    let v = vocab as f64;
    ((c_pos as f64 + alpha) / (n_pos as f64 + alpha * v)).ln() - ((c_all as f64 + alpha) / (n_all as f64 + alpha * v)).ln()
}

/// Ranks corpus n-grams occurring at least `min_count` times by how much
/// more likely they are among the positives, keeping the top `k`.
pub fn select_ngrams(
    dimension: Dimension,
    positives: &[&[Token]],
    corpus: &[&[Token]],
    params: NgramParams,
    exec: Execution,
) -> Result<NgramVocabulary> {
    if corpus.is_empty() {
        return Err(Error::Invalid("n-gram selection needs a non-empty corpus".into()));
    }
    if positives.is_empty() {
        return Err(Error::Untrainable { dimension, message: "no positive sentences for n-gram selection".into() });
    }
    if !(params.alpha >= 0.0 && params.alpha.is_finite()) {
        return Err(Error::Invalid(format!("n-gram alpha must be finite and >= 0, got {}", params.alpha)));
    }
    let all = count_all(exec, corpus);
    let pos = count_all(exec, positives);
    let n_all: usize = all.values().sum();
    let n_pos: usize = pos.values().sum();
    let mut scored: Vec<NgramEntry> = all
        .iter()
        .filter(|(_, &c)| c >= params.min_count)
        .map(|(g, &c)| NgramEntry {
            ngram: g.clone(),
            xi: xi(pos.get(g).copied().unwrap_or(0), n_pos, c, n_all, all.len(), params.alpha),
        })
        .filter(|e| e.xi.is_finite())
        .collect();
    scored.sort_by(|a, b| b.xi.total_cmp(&a.xi).then_with(|| a.ngram.cmp(&b.ngram)));
    scored.truncate(params.k);
    Ok(NgramVocabulary { dimension, entries: scored, min_count: params.min_count, k: params.k })
}

impl NgramVocabulary {
    /// Occurrence counts of each vocabulary n-gram, padded with zeros to `k`.
    pub fn counts(&self, tokens: &[Token]) -> Vec<f64> {
        self.counter().counts(tokens)
    }

    /// Lookup table for counting many sentences against this vocabulary.
    pub fn counter(&self) -> NgramCounter<'_> {
        let index = self.entries.iter().enumerate().map(|(i, e)| (e.ngram.as_str(), i)).collect();
        NgramCounter { index, k: self.k }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rank", "ngram", "xi"])?;
        for (i, e) in self.entries.iter().enumerate() {
            w.write_record([(i + 1).to_string(), e.ngram.clone(), format!("{:.6}", e.xi)])?;
        }
        w.flush().map_err(|e| Error::io("vocab csv", e))?;
        Ok(())
    }
}

pub struct NgramCounter<'a> {
    index: HashMap<&'a str, usize>,
    k: usize,
}

impl NgramCounter<'_> {
    pub fn counts(&self, tokens: &[Token]) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        if self.index.is_empty() {
            return out;
        }
        for g in sentence_ngrams(tokens) {
            if let Some(&i) = self.index.get(g.as_str()) {
                out[i] += 1.0;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    fn toks(texts: &[&str]) -> Vec<Vec<Token>> {
        texts.iter().map(|t| tokenize(t)).collect()
    }

    fn refs(v: &[Vec<Token>]) -> Vec<&[Token]> {
        v.iter().map(Vec::as_slice).collect()
    }

    #[test]
    fn bigrams_break_on_punctuation() {
        let g = sentence_ngrams(&tokenize("thank you, friend"));
        assert_eq!(g, vec!["thank", "you", "thank you", "friend"]);
    }

    #[test]
    fn positive_only_ngram_ranks_first() {
        let corpus = toks(&["thanks a lot", "see a lot", "thanks for it", "see for it"]);
        let pos = toks(&["thanks a lot", "thanks for it"]);
        let params = NgramParams { min_count: 2, k: 10, alpha: 0.01 };
        let v = select_ngrams(Dimension::Support, &refs(&pos), &refs(&corpus), params, Execution::Sequential).unwrap();
        assert_eq!(v.entries[0].ngram, "thanks");
        assert!(v.entries.windows(2).all(|w| w[0].xi >= w[1].xi));
    }

    #[test]
    fn empty_positives_is_error() {
        let corpus = toks(&["a b"]);
        assert!(select_ngrams(Dimension::Fun, &[], &refs(&corpus), NgramParams::default(), Execution::Sequential).is_err());
    }

    #[test]
    fn counts_are_padded_to_k() {
        let v = NgramVocabulary {
            dimension: Dimension::Fun,
            entries: vec![NgramEntry { ngram: "thank you".into(), xi: 1.0 }],
            min_count: 1,
            k: 3,
        };
        assert_eq!(v.counts(&tokenize("thank you, thank you")), vec![2.0, 0.0, 0.0]);
    }
}
