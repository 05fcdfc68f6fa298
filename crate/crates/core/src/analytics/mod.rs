//! Corpus-scale use of trained models: message labels, weekly timelines,
//! relationship labels, regional prevalence and outcome regressions.

mod regression;
mod relationships;
mod timeline;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use crate::corpus::Message;
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::learn::ModelScorer;
use crate::par::{self, Execution};
use crate::text::{split_sentences_with, Sentence, TextRules};

pub use regression::{durbin_watson, ols_regress, stars, write_regression_csv, Coefficient, RegressionResult};
pub use relationships::{pair_key, relationship_label, relationship_labels, Abstain, RelationshipOutcome, DEFAULT_MIN_MESSAGES};
pub use timeline::{timeline, timeline_by, week_start, write_timeline_csv, zscores, TimelineBucket, TimelineSeries};

pub const DEFAULT_THRESHOLD: f64 = 0.95;

/// Anything that maps a sentence to a confidence for one dimension.
pub trait SentenceScorer: Sync {
    fn dimension(&self) -> Dimension;
    /// `Ok(None)` when the sentence cannot be scored (e.g. no embedded word).
    fn score(&self, sentence: &Sentence) -> Result<Option<f64>>;
}

impl SentenceScorer for ModelScorer {
    fn dimension(&self) -> Dimension {
        ModelScorer::dimension(self)
    }

    fn score(&self, sentence: &Sentence) -> Result<Option<f64>> {
        match ModelScorer::score(self, sentence) {
            Ok(s) => Ok(Some(s)),
            Err(Error::NoVector) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TextLabeling {
    pub message_id: String,
    /// Highest sentence score per dimension with at least one scored sentence.
    pub max_scores: BTreeMap<Dimension, f64>,
    pub labeled: BTreeSet<Dimension>,
    /// No sentence of the message could be scored.
    pub unscoreable: bool,
}

impl TextLabeling {
    /// Labels every dimension whose best sentence score is strictly above
    /// `threshold`.
    pub fn from_scores(message_id: &str, scores: &BTreeMap<Dimension, Vec<f64>>, threshold: f64) -> Self {
        let max_scores: BTreeMap<Dimension, f64> = scores
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(&d, v)| (d, v.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
            .collect();
        let labeled = max_scores.iter().filter(|(_, &s)| s > threshold).map(|(&d, _)| d).collect();
        TextLabeling { message_id: message_id.to_string(), unscoreable: max_scores.is_empty(), max_scores, labeled }
    }
}

pub fn label_text<S: SentenceScorer>(message: &Message, scorers: &[S], rules: &TextRules, threshold: f64) -> Result<TextLabeling> {
    let sentences = split_sentences_with(&message.text, rules);
    let mut scores: BTreeMap<Dimension, Vec<f64>> = BTreeMap::new();
    for scorer in scorers {
        let entry = scores.entry(scorer.dimension()).or_default();
        for s in &sentences {
            if let Some(v) = scorer.score(s)? {
                entry.push(v);
            }
        }
    }
    Ok(TextLabeling::from_scores(&message.id, &scores, threshold))
}

pub fn label_messages<S: SentenceScorer>(
    exec: Execution,
    messages: &[Message],
    scorers: &[S],
    rules: &TextRules,
    threshold: f64,
) -> Result<Vec<TextLabeling>> {
    par::try_map(exec, messages, |m| label_text(m, scorers, rules, threshold))
}

/// `message_id,dimension,max_score,labeled`, one row per scored dimension.
pub fn write_labelings_csv<W: Write>(labelings: &[TextLabeling], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["message_id", "dimension", "max_score", "labeled"])?;
    for l in labelings {
        for (d, s) in &l.max_scores {
            w.write_record([
                l.message_id.as_str(),
                d.name(),
                &format!("{s:.6}"),
                if l.labeled.contains(d) { "1" } else { "0" },
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("labelings csv", e))?;
    Ok(())
}

/// Labeled share of each region's messages. Messages whose author has no
/// region are ignored; regions without messages are absent.
pub fn state_prevalence(
    messages: &[Message],
    labelings: &[TextLabeling],
    user_to_region: &BTreeMap<String, String>,
    dimension: Dimension,
) -> BTreeMap<String, f64> {
    let labeled: std::collections::HashMap<&str, bool> =
        labelings.iter().map(|l| (l.message_id.as_str(), l.labeled.contains(&dimension))).collect();
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for m in messages {
        let Some(region) = user_to_region.get(&m.author) else { continue };
        let c = counts.entry(region).or_default();
        c.1 += 1;
        if labeled.get(m.id.as_str()).copied().unwrap_or(false) {
            c.0 += 1;
        }
    }
    counts.into_iter().map(|(r, (l, n))| (r.to_string(), l as f64 / n as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Source;

    fn scores(d: Dimension, v: &[f64]) -> BTreeMap<Dimension, Vec<f64>> {
        [(d, v.to_vec())].into()
    }

    #[test]
    fn strict_threshold() {
        let l = TextLabeling::from_scores("m", &scores(Dimension::Support, &[0.3, 0.96]), DEFAULT_THRESHOLD);
        assert!(l.labeled.contains(&Dimension::Support));
        let l = TextLabeling::from_scores("m", &scores(Dimension::Support, &[0.95, 0.95]), DEFAULT_THRESHOLD);
        assert!(l.labeled.is_empty());
        let l = TextLabeling::from_scores("m", &scores(Dimension::Support, &[]), DEFAULT_THRESHOLD);
        assert!(l.unscoreable && l.labeled.is_empty());
    }

    fn msg(id: &str, author: &str) -> Message {
        Message {
            id: id.into(),
            author: author.into(),
            recipient: None,
            timestamp: None,
            text: "x".into(),
            group: None,
            source: Source::Comments,
        }
    }

    #[test]
    fn prevalence_ratio() {
        let messages: Vec<Message> = (0..10).map(|i| msg(&format!("m{i}"), "a")).chain([msg("z", "nobody")]).collect();
        let labelings: Vec<TextLabeling> = (0..10)
            .map(|i| {
                let s = if i < 2 { 0.99 } else { 0.1 };
                TextLabeling::from_scores(&format!("m{i}"), &scores(Dimension::Fun, &[s]), DEFAULT_THRESHOLD)
            })
            .collect();
        let geo: BTreeMap<String, String> = [("a".to_string(), "CA".to_string())].into();
        let p = state_prevalence(&messages, &labelings, &geo, Dimension::Fun);
        assert_eq!(p, [("CA".to_string(), 0.2)].into());
        assert_eq!(state_prevalence(&messages, &labelings, &geo, Dimension::Trust)["CA"], 0.0);
    }
}
