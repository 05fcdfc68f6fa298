//! Rule-based sentence segmentation, tokenization and passage construction.
//!
//! Everything here is a pure function of its input and of two bundled word
//! lists (abbreviations and 1st/2nd-person pronouns).

mod passages;
mod sentences;
mod tokenize;

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use passages::{build_passages, build_passages_with, Passage};
pub use sentences::{split_sentences, split_sentences_with, Sentence};
pub use tokenize::{raw_tokens, tokenize, RawToken, Token, TokenKind};

/// Word lists the segmenter and the conversational filter depend on.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TextRules {
    pub abbreviations: HashSet<String>,
    pub pronouns: HashSet<String>,
}

impl TextRules {
    pub fn from_lists(abbreviations: &str, pronouns: &str) -> Self {
        TextRules {
            abbreviations: word_set(abbreviations),
            pronouns: word_set(pronouns),
        }
    }

    pub fn bundled() -> &'static TextRules {
        static RULES: OnceLock<TextRules> = OnceLock::new();
        RULES.get_or_init(|| {
            TextRules::from_lists(
                include_str!("../../data/abbreviations.txt"),
                include_str!("../../data/pronouns.txt"),
            )
        })
    }

    pub fn is_conversational(&self, sentence: &Sentence) -> bool {
        sentence
            .tokens
            .iter()
            .any(|t| t.kind == TokenKind::Word && self.pronouns.contains(&t.surface))
    }
}

pub(crate) fn word_set(source: &str) -> HashSet<String> {
    source
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// True iff the sentence contains a 1st or 2nd person pronoun.
pub fn is_conversational(sentence: &Sentence) -> bool {
    TextRules::bundled().is_conversational(sentence)
}

/// Tokens of kind word or number.
pub fn word_count(tokens: &[Token]) -> usize {
    tokens.iter().filter(|t| t.is_wordlike()).count()
}
