//! Category lexicons (LIWC/Empath-style word counting), multi-word phrase
//! lists and the syllable heuristic.

mod syllables;

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::text::{Token, TokenKind};
use crate::{Error, Result};

pub use syllables::count_syllables;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    /// Lowercase; a trailing `*` makes it a prefix pattern.
    pub pattern: String,
    pub category: String,
}

impl LexiconEntry {
    pub fn is_wildcard(&self) -> bool {
        self.pattern.ends_with('*')
    }
}

/// A set of `pattern -> category` entries with categories kept in
/// first-appearance order.
#[derive(Debug, Clone)]
pub struct CategoryLexicon {
    pub name: String,
    pub entries: Vec<LexiconEntry>,
    pub categories: Vec<String>,
    exact: HashMap<String, Vec<usize>>,
    prefixes: Vec<(String, usize)>,
}

impl CategoryLexicon {
    pub fn from_entries(name: impl Into<String>, entries: Vec<LexiconEntry>) -> Result<Self> {
        let mut categories: Vec<String> = Vec::new();
        let mut cat_index: HashMap<String, usize> = HashMap::new();
        let mut exact: HashMap<String, Vec<usize>> = HashMap::new();
        let mut prefixes = Vec::new();
        for (i, e) in entries.iter().enumerate() {
            validate_pattern(&e.pattern).map_err(|m| Error::parse("lexicon", i + 1, m))?;
            let idx = *cat_index.entry(e.category.clone()).or_insert_with(|| {
                categories.push(e.category.clone());
                categories.len() - 1
            });
            if let Some(prefix) = e.pattern.strip_suffix('*') {
                if !prefixes.iter().any(|(p, c)| p == prefix && *c == idx) {
                    prefixes.push((prefix.to_string(), idx));
                }
            } else {
                let cats = exact.entry(e.pattern.clone()).or_default();
                if !cats.contains(&idx) {
                    cats.push(idx);
                }
            }
        }
        Ok(CategoryLexicon {
            name: name.into(),
            entries,
            categories,
            exact,
            prefixes,
        })
    }

    /// Parse the `pattern<TAB>category` format. Blank lines and `#` comments
    /// are ignored; patterns are lowercased.
    pub fn parse(name: &str, source: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in source.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (pattern, category) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(name, i + 1, "expected `pattern<TAB>category`"))?;
            let pattern = pattern.trim().to_lowercase();
            let category = category.trim().to_string();
            validate_pattern(&pattern).map_err(|m| Error::parse(name, i + 1, m))?;
            if category.is_empty() {
                return Err(Error::parse(name, i + 1, "empty category"));
            }
            entries.push(LexiconEntry { pattern, category });
        }
        CategoryLexicon::from_entries(name, entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "lexicon".to_string());
        CategoryLexicon::parse(&name, &text)
    }

    /// Category indices matched by one lowercase word. Exact matches come
    /// first, then wildcard matches; each category appears once.
    pub fn categories_of(&self, word: &str) -> Vec<usize> {
        let mut out: Vec<usize> = self.exact.get(word).cloned().unwrap_or_default();
        for (prefix, cat) in &self.prefixes {
            if word.starts_with(prefix.as_str()) && !out.contains(cat) {
                out.push(*cat);
            }
        }
        out
    }

    /// Fraction of word tokens matching each category, aligned with
    /// [`CategoryLexicon::categories`]. All zeros when there are no word tokens.
    pub fn match_categories(&self, tokens: &[Token]) -> Vec<f64> {
        let mut counts = vec![0usize; self.categories.len()];
        let mut words = 0usize;
        for t in tokens.iter().filter(|t| t.kind == TokenKind::Word) {
            words += 1;
            for c in self.categories_of(&t.surface) {
                counts[c] += 1;
            }
        }
        if words == 0 {
            return vec![0.0; counts.len()];
        }
        counts.into_iter().map(|c| c as f64 / words as f64).collect()
    }

    pub fn match_categories_named(&self, tokens: &[Token]) -> Vec<(String, f64)> {
        self.categories
            .iter()
            .cloned()
            .zip(self.match_categories(tokens))
            .collect()
    }
}

fn validate_pattern(pattern: &str) -> std::result::Result<(), String> {
    if pattern.is_empty() {
        return Err("empty pattern".into());
    }
    if let Some(pos) = pattern.find('*') {
        if pos != pattern.len() - 1 {
            return Err(format!("wildcard must be the final character in `{pattern}`"));
        }
        if pos == 0 {
            return Err("a bare or leading wildcard matches everything".into());
        }
    }
    Ok(())
}

/// Lowercase word/phrase list matched against word-token sequences.
#[derive(Debug, Clone, Default)]
pub struct PhraseList {
    phrases: Vec<Vec<String>>,
    by_first: HashMap<String, Vec<usize>>,
}

impl PhraseList {
    pub fn parse(source: &str) -> Self {
        let mut list = PhraseList::default();
        for line in source.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            list.push(line.to_lowercase().split_whitespace().map(str::to_string).collect());
        }
        list
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut list = PhraseList::default();
        for w in words {
            list.push(w.as_ref().to_lowercase().split_whitespace().map(str::to_string).collect());
        }
        list
    }

    fn push(&mut self, phrase: Vec<String>) {
        if phrase.is_empty() || self.phrases.contains(&phrase) {
            return;
        }
        self.by_first.entry(phrase[0].clone()).or_default().push(self.phrases.len());
        self.phrases.push(phrase);
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn contains_word(&self, word: &str) -> bool {
        self.by_first
            .get(word)
            .is_some_and(|ids| ids.iter().any(|&i| self.phrases[i].len() == 1))
    }

    /// Non-overlapping matches over a lowercase word sequence, longest phrase
    /// first at each position.
    pub fn count_matches(&self, words: &[&str]) -> usize {
        let mut i = 0;
        let mut n = 0;
        while i < words.len() {
            let best = self.by_first.get(words[i]).and_then(|ids| {
                ids.iter()
                    .map(|&id| &self.phrases[id])
                    .filter(|p| p.len() <= words.len() - i && p.iter().zip(&words[i..]).all(|(a, b)| a == b))
                    .map(Vec::len)
                    .max()
            });
            match best {
                Some(len) => {
                    n += 1;
                    i += len;
                }
                None => i += 1,
            }
        }
        n
    }

    /// Matches per word, over the word tokens of a sentence. Zero for no words.
    pub fn ratio(&self, tokens: &[Token]) -> f64 {
        let words: Vec<&str> = tokens
            .iter()
            .filter(|t| t.kind == TokenKind::Word)
            .map(|t| t.surface.as_str())
            .collect();
        if words.is_empty() {
            return 0.0;
        }
        self.count_matches(&words) as f64 / words.len() as f64
    }
}
