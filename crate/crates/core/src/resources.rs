//! Bundled word lists and lexicons, or a directory with the same layout.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::lexicon::{CategoryLexicon, PhraseList};
use crate::text::{word_set, TextRules};
use crate::{Dimension, Error, Result};

#[derive(Debug, Deserialize)]
struct Manifest {
    abbreviations: String,
    pronouns: String,
    anchors: String,
    valence: String,
    boosters: String,
    negations: String,
    offensive: String,
    hate: String,
    dale_chall_easy: String,
    style: StyleManifest,
    #[serde(default)]
    lexicon: Vec<LexiconManifest>,
}

#[derive(Debug, Deserialize)]
struct StyleManifest {
    hedge: String,
    politeness: String,
    morality: String,
    empathy: String,
    integration: String,
}

#[derive(Debug, Deserialize)]
struct LexiconManifest {
    name: String,
    file: String,
}

#[derive(Debug, Clone)]
pub struct StyleLexica {
    pub hedge: PhraseList,
    pub politeness: PhraseList,
    pub morality: PhraseList,
    pub empathy: PhraseList,
    pub integration: PhraseList,
}

/// Everything the feature extractors and the embedding anchors read.
#[derive(Debug, Clone)]
pub struct Resources {
    pub text: TextRules,
    pub anchors: BTreeMap<Dimension, Vec<String>>,
    pub valence: HashMap<String, f64>,
    /// +1 for intensifiers, -1 for dampeners.
    pub boosters: HashMap<String, f64>,
    pub negations: HashSet<String>,
    pub offensive: PhraseList,
    pub hate: PhraseList,
    pub dale_chall_easy: HashSet<String>,
    pub style: StyleLexica,
    pub lexicons: Vec<CategoryLexicon>,
}

const BUNDLED: &[(&str, &str)] = &[
    ("manifest.toml", include_str!("../data/manifest.toml")),
    ("abbreviations.txt", include_str!("../data/abbreviations.txt")),
    ("pronouns.txt", include_str!("../data/pronouns.txt")),
    ("anchors.tsv", include_str!("../data/anchors.tsv")),
    ("valence.tsv", include_str!("../data/valence.tsv")),
    ("boosters.tsv", include_str!("../data/boosters.tsv")),
    ("negations.txt", include_str!("../data/negations.txt")),
    ("offensive.txt", include_str!("../data/offensive.txt")),
    ("hate.txt", include_str!("../data/hate.txt")),
    ("dale_chall_easy.txt", include_str!("../data/dale_chall_easy.txt")),
    ("hedges.txt", include_str!("../data/hedges.txt")),
    ("politeness.txt", include_str!("../data/politeness.txt")),
    ("morality.txt", include_str!("../data/morality.txt")),
    ("empathy.txt", include_str!("../data/empathy.txt")),
    ("integration.txt", include_str!("../data/integration.txt")),
    ("lexicon_liwc_open.tsv", include_str!("../data/lexicon_liwc_open.tsv")),
    ("lexicon_empath_open.tsv", include_str!("../data/lexicon_empath_open.tsv")),
];

impl Resources {
    pub fn bundled() -> Arc<Resources> {
        static CACHE: std::sync::OnceLock<Arc<Resources>> = std::sync::OnceLock::new();
        CACHE
            .get_or_init(|| {
                let read = |name: &str| {
                    BUNDLED
                        .iter()
                        .find(|(n, _)| *n == name)
                        .map(|(_, s)| s.to_string())
                        .ok_or_else(|| Error::Invalid(format!("no bundled resource `{name}`")))
                };
                Arc::new(Resources::from_reader(read).expect("bundled resources are valid"))
            })
            .clone()
    }

    /// Load from a directory holding a `manifest.toml`.
    pub fn load_dir(dir: &Path) -> Result<Resources> {
        Resources::from_reader(|name| {
            let p = dir.join(name);
            std::fs::read_to_string(&p).map_err(|e| Error::io(p, e))
        })
    }

    fn from_reader(read: impl Fn(&str) -> Result<String>) -> Result<Resources> {
        let manifest: Manifest = toml::from_str(&read("manifest.toml")?)
            .map_err(|e| Error::Invalid(format!("manifest.toml: {e}")))?;
        let phrases = |name: &str| read(name).map(|s| PhraseList::parse(&s));
        let lexicons = manifest
            .lexicon
            .iter()
            .map(|l| CategoryLexicon::parse(&l.name, &read(&l.file)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Resources {
            text: TextRules::from_lists(&read(&manifest.abbreviations)?, &read(&manifest.pronouns)?),
            anchors: parse_anchors(&read(&manifest.anchors)?)?,
            valence: parse_weights("valence", &read(&manifest.valence)?)?,
            boosters: parse_weights("boosters", &read(&manifest.boosters)?)?,
            negations: word_set(&read(&manifest.negations)?),
            offensive: phrases(&manifest.offensive)?,
            hate: phrases(&manifest.hate)?,
            dale_chall_easy: word_set(&read(&manifest.dale_chall_easy)?),
            style: StyleLexica {
                hedge: phrases(&manifest.style.hedge)?,
                politeness: phrases(&manifest.style.politeness)?,
                morality: phrases(&manifest.style.morality)?,
                empathy: phrases(&manifest.style.empathy)?,
                integration: phrases(&manifest.style.integration)?,
            },
            lexicons,
        })
    }
}

fn parse_anchors(source: &str) -> Result<BTreeMap<Dimension, Vec<String>>> {
    let mut out = BTreeMap::new();
    for (i, line) in source.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (dim, words) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse("anchors", i + 1, "expected `dimension<TAB>keywords`"))?;
        let dim: Dimension = dim.parse().map_err(|e: Error| Error::parse("anchors", i + 1, e.to_string()))?;
        let words: Vec<String> = words
            .split(',')
            .map(|w| w.trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        out.insert(dim, words);
    }
    Ok(out)
}

fn parse_weights(name: &str, source: &str) -> Result<HashMap<String, f64>> {
    let mut out = HashMap::new();
    for (i, line) in source.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (word, value) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(name, i + 1, "expected `word<TAB>value`"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::parse(name, i + 1, format!("bad number `{}`", value.trim())))?;
        out.entry(word.trim().to_lowercase()).or_insert(value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_resources_load() {
        let r = Resources::bundled();
        assert_eq!(r.anchors.len(), 10);
        assert_eq!(
            r.anchors[&Dimension::Fun],
            vec!["funny", "humor", "playful", "comedy", "cheer", "enjoy", "entertaining"]
        );
        assert_eq!(r.valence["good"], 1.9);
        assert_eq!(r.lexicons.len(), 2);
        assert_eq!(r.lexicons[0].categories.len(), 15);
        assert!(r.style.hedge.contains_word("maybe"));
        assert!(!r.style.hedge.contains_word("could"));
    }

    #[test]
    fn directory_with_same_layout_loads() {
        let dir = tempfile::tempdir().unwrap();
        for (name, body) in BUNDLED {
            std::fs::write(dir.path().join(name), body).unwrap();
        }
        let r = Resources::load_dir(dir.path()).unwrap();
        assert_eq!(r.lexicons.len(), 2);
    }
}
