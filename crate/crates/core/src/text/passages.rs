use serde::{Deserialize, Serialize};

use super::{split_sentences_with, Sentence, TextRules};

/// A target sentence with its neighbours from the same text, the unit shown
/// to annotators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Passage {
    pub target: Sentence,
    pub before: Option<Sentence>,
    pub after: Option<Sentence>,
}

pub fn build_passages(text: &str, min_len: usize, max_len: usize) -> Vec<Passage> {
    build_passages_with(text, min_len, max_len, TextRules::bundled())
}

/// One passage per conversational sentence whose word count lies in
/// `[min_len, max_len]`.
pub fn build_passages_with(text: &str, min_len: usize, max_len: usize, rules: &TextRules) -> Vec<Passage> {
    let sentences = split_sentences_with(text, rules);
    sentences
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let n = s.word_count();
            (min_len..=max_len).contains(&n) && rules.is_conversational(s)
        })
        .map(|(i, s)| Passage {
            target: s.clone(),
            before: i.checked_sub(1).map(|j| sentences[j].clone()),
            after: sentences.get(i + 1).cloned(),
        })
        .collect()
}
