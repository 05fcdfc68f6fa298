//! Averaged word vectors, dimension anchors and the distance baseline.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::resources::Resources;
use crate::text::{Sentence, Token};

/// Largest fraction of malformed lines tolerated by the loader.
pub const MAX_SKIPPED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmbeddingLoadStats {
    pub lines: usize,
    pub skipped: usize,
    pub duplicates: usize,
    pub filtered: usize,
}

/// Immutable word -> vector table. Vectors are stored as f32, arithmetic
/// is done in f64.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingStore {
    dim: usize,
    index: HashMap<String, usize>,
    data: Vec<f32>,
    pub stats: EmbeddingLoadStats,
}

impl EmbeddingStore {
    pub fn new(dim: usize) -> Self {
        EmbeddingStore { dim, ..Default::default() }
    }

    /// Builds a store from in-memory pairs; first occurrence of a word wins.
    pub fn from_pairs<I, S>(dim: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut store = EmbeddingStore::new(dim);
        for (w, v) in pairs {
            if v.len() != dim || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Invalid(format!("embedding vector must have {dim} finite values")));
            }
            store.insert(w.into(), v.iter().map(|&x| x as f32));
        }
        Ok(store)
    }

    fn insert(&mut self, word: String, values: impl Iterator<Item = f32>) -> bool {
        if self.index.contains_key(&word) {
            return false;
        }
        self.index.insert(word, self.index.len());
        self.data.extend(values);
        true
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index.get(word).map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }
}

fn is_header(line: &str) -> bool {
    let parts: Vec<&str> = line.split_whitespace().collect();
    parts.len() == 2 && parts.iter().all(|p| p.parse::<usize>().is_ok())
}

/// Loads a `word v1 ... vd` text file.
pub fn load_embeddings(path: &Path, expected_dim: usize) -> Result<EmbeddingStore> {
    load_embeddings_filtered(path, expected_dim, None)
}

/// Like [`load_embeddings`] but keeps only words in `keep`, which saves
/// memory on large files when the corpus vocabulary is known.
pub fn load_embeddings_filtered(
    path: &Path,
    expected_dim: usize,
    keep: Option<&HashSet<String>>,
) -> Result<EmbeddingStore> {
    if expected_dim == 0 {
        return Err(Error::Invalid("embedding dimension must be positive".into()));
    }
    let reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let mut store = EmbeddingStore::new(expected_dim);
    let mut stats = EmbeddingLoadStats::default();
    let mut values = Vec::with_capacity(expected_dim);
    for (i, line) in reader.split(b'\n').enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = String::from_utf8_lossy(&line);
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || (i == 0 && is_header(line)) {
            continue;
        }
        stats.lines += 1;
        let mut parts = line.split(' ').filter(|p| !p.is_empty());
        let Some(word) = parts.next() else {
            stats.skipped += 1;
            continue;
        };
        if keep.is_some_and(|k| !k.contains(word)) {
            stats.filtered += 1;
            continue;
        }
        values.clear();
        let mut ok = true;
        for p in parts {
            match p.parse::<f32>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || values.len() != expected_dim {
            stats.skipped += 1;
            continue;
        }
        if !store.insert(word.to_string(), values.iter().copied()) {
            stats.duplicates += 1;
        }
    }
    if stats.lines == 0 {
        return Err(Error::Invalid(format!("{}: embedding file is empty", path.display())));
    }
    if stats.skipped as f64 > MAX_SKIPPED_FRACTION * stats.lines as f64 {
        return Err(Error::FormatMismatch { path: path.to_path_buf(), malformed: stats.skipped, total: stats.lines });
    }
    if store.is_empty() && keep.is_none() {
        return Err(Error::Invalid(format!("{}: no usable embedding vectors", path.display())));
    }
    store.stats = stats;
    Ok(store)
}

/// Mean of the in-vocabulary word vectors; out-of-vocabulary tokens are
/// skipped rather than counted as zeros.
pub fn sentence_vector(tokens: &[Token], store: &EmbeddingStore) -> Result<Vec<f64>> {
    let mut sum = vec![0.0f64; store.dim()];
    let mut n = 0usize;
    for t in tokens.iter().filter(|t| t.is_wordlike()) {
        if let Some(v) = store.get(&t.surface) {
            sum.iter_mut().zip(v).for_each(|(s, &x)| *s += x as f64);
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::NoVector);
    }
    sum.iter_mut().for_each(|s| *s /= n as f64);
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionAnchor {
    pub dimension: Dimension,
    pub keywords: Vec<String>,
    /// Keywords that were found in the store and averaged.
    pub used: Vec<String>,
    pub vector: Vec<f64>,
}

impl DimensionAnchor {
    pub fn from_keywords(dimension: Dimension, keywords: &[String], store: &EmbeddingStore) -> Result<Self> {
        let mut sum = vec![0.0f64; store.dim()];
        let mut used = Vec::new();
        for k in keywords {
            if let Some(v) = store.get(k) {
                sum.iter_mut().zip(v).for_each(|(s, &x)| *s += x as f64);
                used.push(k.clone());
            }
        }
        if used.is_empty() {
            return Err(Error::AnchorOutOfVocabulary(dimension));
        }
        sum.iter_mut().for_each(|s| *s /= used.len() as f64);
        Ok(DimensionAnchor { dimension, keywords: keywords.to_vec(), used, vector: sum })
    }
}

/// Anchor from the bundled keyword list of a dimension.
pub fn anchor_vector(dimension: Dimension, store: &EmbeddingStore, resources: &Resources) -> Result<DimensionAnchor> {
    let keywords = resources.anchors.get(&dimension).map(Vec::as_slice).unwrap_or(&[]);
    DimensionAnchor::from_keywords(dimension, keywords, store)
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Euclidean distance between sentence and anchor vectors; smaller is more
/// relevant.
pub fn distance_score(sentence: &Sentence, anchor: &DimensionAnchor, store: &EmbeddingStore) -> Result<f64> {
    Ok(euclidean(&sentence_vector(&sentence.tokens, store)?, &anchor.vector))
}

/// Maps a distance onto (0, 1], decreasing.
pub fn pseudo_confidence(distance: f64) -> f64 {
    1.0 / (1.0 + distance)
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Average cosine similarity over all unordered pairs; a homogeneity
/// diagnostic for groups of sentence vectors. `None` for fewer than two.
pub fn mean_pairwise_cosine(vectors: &[Vec<f64>]) -> Option<f64> {
    if vectors.len() < 2 {
        return None;
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            sum += cosine(&vectors[i], &vectors[j]);
            n += 1;
        }
    }
    Some(sum / n as f64)
}
