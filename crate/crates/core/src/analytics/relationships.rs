use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::TextLabeling;
use crate::corpus::Message;
use crate::dimension::Dimension;

pub const DEFAULT_MIN_MESSAGES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Abstain {
    TooFewMessages { messages: usize, required: usize },
    NoLabels,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RelationshipOutcome {
    Label { dimension: Dimension, count: usize, mean_max_score: f64 },
    Abstain(Abstain),
}

/// Most frequent labeled dimension over a pair's messages (both
/// directions). Ties go to the higher mean max-score, then to the earlier
/// dimension in canonical order.
pub fn relationship_label(labelings: &[&TextLabeling], min_messages: usize) -> RelationshipOutcome {
    if labelings.len() < min_messages {
        return RelationshipOutcome::Abstain(Abstain::TooFewMessages { messages: labelings.len(), required: min_messages });
    }
    let mut best: Option<(usize, f64, Dimension)> = None;
    for d in Dimension::ALL {
        let count = labelings.iter().filter(|l| l.labeled.contains(&d)).count();
        if count == 0 {
            continue;
        }
        let scores: Vec<f64> = labelings.iter().filter_map(|l| l.max_scores.get(&d).copied()).collect();
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        let better = match best {
            None => true,
            Some((c, m, _)) => count > c || (count == c && mean > m),
        };
        if better {
            best = Some((count, mean, d));
        }
    }
    match best {
        Some((count, mean_max_score, dimension)) => RelationshipOutcome::Label { dimension, count, mean_max_score },
        None => RelationshipOutcome::Abstain(Abstain::NoLabels),
    }
}

/// Unordered pair key.
pub fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Labels every pair of users that exchanged messages; messages without a
/// recipient are ignored.
pub fn relationship_labels(
    messages: &[Message],
    labelings: &[TextLabeling],
    min_messages: usize,
) -> BTreeMap<(String, String), RelationshipOutcome> {
    let by_id: HashMap<&str, &TextLabeling> = labelings.iter().map(|l| (l.message_id.as_str(), l)).collect();
    let mut pairs: BTreeMap<(String, String), Vec<&TextLabeling>> = BTreeMap::new();
    for m in messages {
        let (Some(r), Some(l)) = (&m.recipient, by_id.get(m.id.as_str())) else { continue };
        if *r != m.author {
            pairs.entry(pair_key(&m.author, r)).or_default().push(l);
        }
    }
    pairs.into_iter().map(|(k, ls)| (k, relationship_label(&ls, min_messages))).collect()
}
